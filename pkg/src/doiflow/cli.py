"""Command-line interface.

    doiflow <command> --config <path> [--workers N] [--output <path>] [--no-figures]

Commands: doi, dk, flow, weightfn, verify.  The config is a single JSON
object (see config.py); when --config is omitted, defaults are used.  Exit
codes: 0 success, 1 check failure, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import flow as fl, kernels as kn, perturbation as pt, reports
from .config import COMMANDS, ScenarioConfig, load_config, parse_config
from .doi import doi_apply, doi_apply_decomposed, doi_adjoint_check, trace_pairing
from .errors import ConfigError, DoiflowError
from .kernels import exp_kernel, kernel_const_one, multiplier_bound, wiener_cos
from .linalg import op_norm
from .models import build_model
from .pvm import pvm_from_hermitian
from .rng import CounterRng
from .verify import run_all


def _model_for(config: ScenarioConfig):
    params = dict(config.model_params)
    if config.model_name == "random_gapped" and "seed" not in params:
        params["seed"] = config.seed
    return build_model(config.model_name, params, (config.s_start, config.s_end))


def _weight_function(config: ScenarioConfig, gamma: float):
    return fl.build_weight_function(
        gamma, fourier_nodes=config.fourier_nodes, t_max_factor=config.t_max_factor)


def _gamma_for(config: ScenarioConfig, model=None) -> float:
    if config.gamma is not None:
        return config.gamma
    if model is not None:
        return model.gamma
    return 2.0


def _output_path(config: ScenarioConfig, override, suffix: str) -> str:
    if override:
        return override
    if config.output:
        return config.output
    return f"doiflow_{config.command}.{suffix}"


def run_flow(config: ScenarioConfig, output: str, figures: bool) -> int:
    model = _model_for(config)
    model.validate(n_sweep=33)
    gamma = _gamma_for(config, model)
    wf = _weight_function(config, gamma)
    s_grid = np.linspace(config.s_start, config.s_end, config.steps + 1)
    result = fl.flow_integrate(model.path, wf, model.interval_fn, s_grid,
                               contour_nodes=config.contour_nodes)
    reports.write_flow_csv(output, result, config.echo())
    if result.failure is not None:
        with open(output, "a", encoding="utf-8") as fh:
            fh.write(f"# failure={result.failure}\n")
    if figures and result.diagnostics:
        reports.render_flow_figure(output, result)
    print(f"flow: wrote {output} ({result.completed} grid points)")
    if result.failure is not None:
        print(f"flow aborted: {result.failure}", file=sys.stderr)
        return 3
    rep = fl.verify_automorphic_equivalence(result)
    print(f"flow: max transport error {rep.max_error:.3e}, "
          f"max unitarity defect {rep.max_unitarity_defect:.3e}")
    return 0 if rep.max_unitarity_defect <= 1e-8 and rep.rank_constant else 1


def run_weightfn(config: ScenarioConfig, output: str, figures: bool) -> int:
    gamma = _gamma_for(config)
    wf = _weight_function(config, gamma)
    reports.write_weightfn_csv(output, wf, config.echo())
    if figures:
        reports.render_weightfn_figure(output, wf)
    xi_check = np.linspace(1.05, 10.0, 40) * gamma
    supp = float(np.max(np.abs(wf.fourier_reconstruction(xi_check))))
    checks = [("normalization", abs(wf.norm - 1.0), 1e-8),
              ("fourier_support", supp, 1e-6),
              ("first_moment", abs(wf.first_moment), 1e-8)]
    ok = True
    for name, measured, tol in checks:
        status = "pass" if measured <= tol else "fail"
        ok = ok and measured <= tol
        print(f"weightfn {name}: {measured:.3e} (tol {tol:.0e}) {status}")
    print(f"weightfn: wrote {output}")
    return 0 if ok else 1


def _doi_battery(config: ScenarioConfig, model):
    """DOI identity checks on the model path: unit action, oracle agreement,
    function differences, adjoint and trace pairings."""
    rng = CounterRng(config.seed)
    rows = []
    samples = np.linspace(config.s_start, config.s_end, 5)
    span = config.s_end - config.s_start
    for s in samples:
        h = model.path.hamiltonian(float(s))
        e = pvm_from_hermitian(h)
        dim = e.dim
        t_mat = rng.complex_matrix(dim, dim)
        unit = op_norm(doi_apply(kernel_const_one(), e, e, t_mat) - t_mat)
        rows.append(("unit_identity", float(s), unit, 1e-12))
        k = exp_kernel(1.0)
        diff = op_norm(doi_apply(k, e, e, t_mat) - doi_apply_decomposed(k, e, e, t_mat))
        scale = (1.0 + float(np.linalg.norm(t_mat))) * max(1.0, multiplier_bound(k, e, e))
        rows.append(("oracle_equivalence", float(s), diff / scale, 1e-9))
        rows.append(("adjoint_identity", float(s),
                     doi_adjoint_check(k.as_kernel(), e, e, t_mat), 1e-10))
        tp = trace_pairing(k, e, e, rng.complex_matrix(dim, dim), t_mat)
        rows.append(("trace_pairing", float(s), tp.residual, 1e-9))
        phi = 0.25 * span * model.path.derivative(float(s))
        for name, f in (("exp", (np.exp, np.exp)),
                        ("cos", wiener_cos(1.0))):
            r = pt.f_difference(h, phi, f)
            scale = 1.0 + op_norm(r.direct) + op_norm(r.doi)
            rows.append((f"f_difference_{name}", float(s), r.residual / scale, 1e-8))
    return rows


def run_doi(config: ScenarioConfig, output: str, figures: bool) -> int:
    model = _model_for(config)
    rows = _doi_battery(config, model)
    table = [[name, s, measured, tol, "pass" if measured <= tol else "fail"]
             for name, s, measured, tol in rows]
    reports.write_table_csv(output, "doi", config.echo(),
                            ["check", "s", "measured", "tolerance", "status"], table)
    if figures:
        reports.render_residual_figure(
            output, "DOI identity residuals",
            [f"{r[0]}@{r[1]:.2g}" for r in rows],
            [r[2] for r in rows], [r[3] for r in rows])
    n_fail = sum(1 for r in table if r[4] == "fail")
    print(f"doi: wrote {output} ({len(table)} checks, {n_fail} failures)")
    return 0 if n_fail == 0 else 1


def run_dk(config: ScenarioConfig, output: str, figures: bool) -> int:
    model = _model_for(config)
    rows = []
    pad = 2e-3 * (1.0 + max(abs(config.s_start), abs(config.s_end)))
    samples = np.linspace(config.s_start + pad, config.s_end - pad, 5)
    fns = [("exp", (np.exp, np.exp)),
           ("sin", kn.wiener_sin(1.0)),
           ("cauchy", kn.wiener_cauchy())]
    for s in samples:
        s = float(s)
        if pt.min_eigenvalue_gap(model.path.hamiltonian(s)) < 1e-6:
            continue
        for name, f in fns:
            dk = pt.dk_derivative(model.path, s, f)
            fd = pt.fd_derivative(model.path, s, f, h=1e-4)
            rel = op_norm(dk - fd) / (1.0 + op_norm(dk))
            e1 = op_norm(pt.fd_derivative(model.path, s, f, h=1e-3) - dk)
            e2 = op_norm(pt.fd_derivative(model.path, s, f, h=5e-4) - dk)
            ratio = e1 / e2 if e2 > 0 else float("nan")
            ratio_ok = (3.0 <= ratio <= 5.0) or e1 <= 1e-11
            status = "pass" if rel <= 1e-5 and ratio_ok else "fail"
            rows.append([name, s, rel, 1e-5, ratio, status])
    reports.write_table_csv(
        output, "dk", config.echo(),
        ["f", "s", "rel_deviation", "tolerance", "halving_ratio", "status"], rows,
        notes=["divided-difference kernels use the symmetric midpoint surrogate "
               "f'((x+y)/2) within the relative diagonal band 1e-7"])
    if figures:
        reports.render_residual_figure(
            output, "derivative vs finite-difference deviation",
            [f"{r[0]}@{r[1]:.2g}" for r in rows],
            [r[2] for r in rows], [r[3] for r in rows])
    n_fail = sum(1 for r in rows if r[5] == "fail")
    print(f"dk: wrote {output} ({len(rows)} checks, {n_fail} failures)")
    return 0 if n_fail == 0 else 1


def run_verify(config: ScenarioConfig, output: str, figures: bool, workers: int) -> int:
    def progress(res):
        print(f"[{res.criterion_id:2d}] {res.name}: {res.status} "
              f"(measured {res.measured:.3e}, tolerance {res.tolerance:.1e})")
        if res.detail:
            print(f"     {res.detail}")

    results = run_all(seed=config.seed, workers=workers, progress=progress)
    reports.write_verify_json(output, results, config.echo())
    if figures:
        fig_stub = output if output.endswith(".json") else output + ".json"
        reports.render_residual_figure(
            fig_stub, "acceptance criteria: measured vs tolerance",
            [f"{r.criterion_id}:{r.name}" for r in results],
            [max(r.measured, 0.0) for r in results],
            [r.tolerance for r in results])
    n_fail = sum(1 for r in results if not r.passed)
    print(f"verify: wrote {output} ({len(results)} criteria, {n_fail} failures)")
    return 0 if n_fail == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="doiflow",
        description="Double operator integrals and gapped spectral flow, numerically.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to a JSON scenario config")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker threads for independent checks; results "
                             "are merged in criterion order, so the output is "
                             "identical for any worker count")
    parser.add_argument("--output", help="output file path (overrides config)")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip rendering figures next to the data files")
    args = parser.parse_args(argv)

    try:
        if args.config:
            config = load_config(args.config)
            if config.command != args.command:
                raise ConfigError(
                    f"config command {config.command!r} does not match "
                    f"CLI command {args.command!r} (command)")
        else:
            config = parse_config(f'{{"command": "{args.command}"}}')
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    figures = not args.no_figures
    suffix = "json" if args.command == "verify" else "csv"
    output = _output_path(config, args.output, suffix)

    try:
        if args.command == "flow":
            return run_flow(config, output, figures)
        if args.command == "weightfn":
            return run_weightfn(config, output, figures)
        if args.command == "doi":
            return run_doi(config, output, figures)
        if args.command == "dk":
            return run_dk(config, output, figures)
        return run_verify(config, output, figures, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DoiflowError as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
