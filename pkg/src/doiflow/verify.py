"""The full verification suite: every identity of the library as a seeded,
tolerance-pinned check.

Each criterion measures the worst residual (or bound violation) over its
battery and passes iff measured <= tolerance.  All randomness comes from the
counter-based stream seeded per criterion, so repeated runs with the same
seed produce identical numbers.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import doi, flow as fl, kernels as kn, models as md, perturbation as pt
from . import pvm as pv
from .linalg import (hermitian_part, norms, op_norm,
                     recover_operator_from_quadratic_form)
from .rng import CounterRng


@dataclass(frozen=True)
class CriterionResult:
    criterion_id: int
    name: str
    status: str            # "pass" | "fail"
    measured: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _result(cid, name, measured, tolerance, detail="", ok=None):
    if ok is None:
        ok = measured <= tolerance
    return CriterionResult(criterion_id=cid, name=name,
                           status="pass" if ok else "fail",
                           measured=float(measured), tolerance=float(tolerance),
                           detail=detail)


def _random_kernel(rng: CounterRng) -> kn.DecomposedKernel:
    """A small random separable family with smooth numpy-capable factors."""
    n_terms = 1 + int(rng.integers(0, 3, 1)[0])
    weights = 0.2 + rng.uniform(n_terms)
    alphas = []
    betas = []
    for _ in range(n_terms):
        c = rng.normal(4)
        alphas.append(lambda x, c=c: c[0] + c[1] * np.asarray(x) + 1j * c[2] * np.sin(c[3] * np.asarray(x)))
        d = rng.normal(4)
        betas.append(lambda y, d=d: d[0] + 1j * d[1] * np.asarray(y) + d[2] * np.cos(d[3] * np.asarray(y)))
    return kn.DecomposedKernel(weights, tuple(alphas), tuple(betas), label="random")


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

def criterion_pvm_axioms(seed: int) -> CriterionResult:
    """PVM axioms and product-measure consistency, 200 instances, dims <= 12."""
    rng = CounterRng(seed ^ 0x01)
    tol = 1e-10
    worst = 0.0
    for trial in range(200):
        dim_l = 2 + int(rng.integers(0, 11, 1)[0])
        dim_r = 2 + int(rng.integers(0, 11, 1)[0])
        e = pv.pvm_from_hermitian(rng.hermitian(dim_l))
        f = pv.pvm_from_hermitian(rng.hermitian(dim_r))
        for p in (e, f):
            eye = np.eye(p.dim)
            total = np.zeros((p.dim, p.dim), dtype=complex)
            for a in p.projectors:
                worst = max(worst, float(np.max(np.abs(a @ a - a))),
                            float(np.max(np.abs(a - a.conj().T))))
                total += a
            worst = max(worst, float(np.max(np.abs(total - eye))))
            for i in range(p.n_atoms):
                for j in range(i + 1, p.n_atoms):
                    worst = max(worst, float(np.max(np.abs(
                        p.projectors[i] @ p.projectors[j]))))
        g = pv.ProductPVM(e, f)
        s = rng.complex_matrix(dim_l, dim_r)
        t = rng.complex_matrix(dim_l, dim_r)
        n_g = 1 + int(rng.integers(0, e.n_atoms, 1)[0])
        n_d = 1 + int(rng.integers(0, f.n_atoms, 1)[0])
        gamma_set = sorted(set(rng.integers(0, e.n_atoms, n_g).tolist()))
        delta_set = sorted(set(rng.integers(0, f.n_atoms, n_d).tolist()))
        region = [(i, j) for i in gamma_set for j in delta_set]
        lhs = np.trace(s.conj().T @ pv.product_apply(g, region, t))
        rhs = np.trace(s.conj().T @ (e.projector_for(gamma_set) @ t
                                     @ f.projector_for(delta_set)))
        worst = max(worst, abs(complex(lhs) - complex(rhs)))
    return _result(1, "pvm_axioms_product_consistency", worst, tol,
                   "200 random PVM pairs, dims <= 12")


def criterion_polarization(seed: int) -> CriterionResult:
    """Operator recovery from its quadratic form, 100 instances, dims <= 32."""
    rng = CounterRng(seed ^ 0x02)
    worst = 0.0
    for trial in range(100):
        dim = 2 + int(rng.integers(0, 31, 1)[0])
        m = rng.hermitian(dim)
        rec = recover_operator_from_quadratic_form(
            lambda u, m=m: complex(u.conj() @ (m @ u)), dim)
        worst = max(worst, op_norm(rec - m) / (1.0 + op_norm(m)))
    return _result(2, "polarization_recovery", worst, 1e-12,
                   "100 random Hermitian forms, dims <= 32")


def criterion_doi_algebra(seed: int) -> CriterionResult:
    """Unit kernel acts as identity (1e-12); multiplicativity over 100 pairs (1e-9)."""
    rng = CounterRng(seed ^ 0x03)
    worst_unit = 0.0
    worst_mult = 0.0
    one = kn.kernel_const_one()
    for trial in range(100):
        dim = 2 + int(rng.integers(0, 15, 1)[0])
        e = pv.pvm_from_hermitian(rng.hermitian(dim))
        f = pv.pvm_from_hermitian(rng.hermitian(dim))
        t = rng.complex_matrix(dim, dim)
        worst_unit = max(worst_unit,
                         op_norm(doi.doi_apply(one, e, f, t) - t) / (1 + op_norm(t)))
        k1 = _random_kernel(rng).as_kernel()
        k2 = _random_kernel(rng).as_kernel()
        prod = kn.Kernel(lambda x, y, k1=k1, k2=k2: k1(x, y) * k2(x, y),
                         vectorized=True)
        lhs = doi.doi_apply(prod, e, f, t)
        rhs = doi.doi_apply(k1, e, f, doi.doi_apply(k2, e, f, t))
        scale = 1.0 + op_norm(lhs)
        worst_mult = max(worst_mult, op_norm(lhs - rhs) / scale)
    ok = worst_unit <= 1e-12 and worst_mult <= 1e-9
    return _result(3, "doi_algebra_homomorphism", max(worst_unit, worst_mult), 1e-9,
                   f"unit residual {worst_unit:.2e} (tol 1e-12), "
                   f"multiplicativity {worst_mult:.2e} (tol 1e-9)", ok=ok)


def _kernel_suite(rng: CounterRng) -> list:
    suite = [kn.decomposed_one()]
    for t in (0.7, -1.3, 2.0):
        suite.append(kn.exp_kernel(t))
    suite.append(kn.divided_difference_decomposed(kn.wiener_cos(1.2), r_nodes=24))
    suite.append(kn.divided_difference_decomposed(kn.wiener_sin(0.8), r_nodes=24))
    cauchy = kn.WienerFunction(kn.cauchy_measure(t_max=30.0, n_panels=16),
                               label="cauchy-coarse")
    suite.append(kn.divided_difference_decomposed(cauchy, r_nodes=16))
    suite.append(_random_kernel(rng))
    suite.append(kn.decomposed_sum(kn.exp_kernel(0.9), _random_kernel(rng)))
    suite.append(kn.decomposed_product(kn.exp_kernel(0.5), _random_kernel(rng)))
    return suite


def criterion_oracle_equivalence(seed: int) -> CriterionResult:
    """Schur path vs decomposition sum on every decomposed kernel in the suite."""
    rng = CounterRng(seed ^ 0x04)
    worst = 0.0
    for k in _kernel_suite(rng):
        for trial in range(2):
            dim = 2 + int(rng.integers(0, 9, 1)[0])
            e = pv.pvm_from_hermitian(rng.hermitian(dim))
            f = pv.pvm_from_hermitian(rng.hermitian(dim))
            t = rng.complex_matrix(dim, dim)
            a = doi.doi_apply(k, e, f, t)
            b = doi.doi_apply_decomposed(k, e, f, t)
            bound = kn.multiplier_bound(k, e, f) if k.n_terms else 0.0
            scale = (1.0 + float(np.linalg.norm(t))) * max(1.0, bound)
            worst = max(worst, op_norm(a - b) / scale)
    return _result(4, "doi_oracle_equivalence", worst, 1e-9,
                   "doi_apply vs decomposition sum over the kernel suite")


def criterion_norm_inequalities(seed: int) -> CriterionResult:
    """sup |phi| <= decomposition cost; operator/trace norm contraction bounds."""
    rng = CounterRng(seed ^ 0x05)
    worst = 0.0
    kernels = [kn.exp_kernel(1.7),
               kn.divided_difference_decomposed(kn.wiener_cos(1.0), r_nodes=24),
               _random_kernel(rng), kn.decomposed_one()]
    for trial in range(100):
        k = kernels[trial % len(kernels)]
        dim = 2 + int(rng.integers(0, 11, 1)[0])
        e = pv.pvm_from_hermitian(rng.hermitian(dim))
        f = pv.pvm_from_hermitian(rng.hermitian(dim))
        bound = kn.multiplier_bound(k, e, f)
        sup_phi = doi.doi_s2_norm(k, e, f) if k.n_terms else 0.0
        worst = max(worst, (sup_phi - bound) / max(1.0, bound))
        t = rng.complex_matrix(dim, dim)
        out = doi.doi_apply_decomposed(k, e, f, t)
        n_out = norms(out)
        n_t = norms(t)
        worst = max(worst, (n_out.op_norm - bound * n_t.op_norm)
                    / max(1.0, bound * n_t.op_norm))
        worst = max(worst, (n_out.trace_norm - bound * n_t.trace_norm)
                    / max(1.0, bound * n_t.trace_norm))
    return _result(5, "multiplier_norm_bounds", worst, 1e-9,
                   "sup|phi| <= cost and op/trace contraction over 100 draws",
                   ok=worst <= 1e-9)


def criterion_exp_difference(seed: int) -> CriterionResult:
    """||e^(itB) - e^(itA)|| <= |t| ||Phi|| + 1e-10 over 100 draws."""
    rng = CounterRng(seed ^ 0x06)
    worst = -np.inf
    for trial in range(100):
        dim = 2 + int(rng.integers(0, 15, 1)[0])
        a = rng.hermitian(dim)
        phi = rng.hermitian(dim) * float(0.1 + 2.0 * rng.uniform(1)[0])
        t = float(-5.0 + 10.0 * rng.uniform(1)[0])
        chk = pt.exp_difference_bound(a, phi, t)
        worst = max(worst, chk.lhs_norm - chk.bound)
    return _result(6, "exponential_difference_bound", worst, 1e-10,
                   "100 random (A, Phi, t); measured = max(lhs - bound), "
                   "negative means the bound held with margin")


def _f_triple():
    return [
        ("exp", (np.exp, np.exp)),
        ("sin", kn.wiener_sin(1.0)),
        ("cauchy", kn.wiener_cauchy()),
    ]


def criterion_f_difference(seed: int) -> CriterionResult:
    """f(B) - f(A) as a divided-difference DOI, 50 pairs x 3 functions, dims <= 16."""
    rng = CounterRng(seed ^ 0x07)
    worst = 0.0
    for trial in range(50):
        dim = 2 + int(rng.integers(0, 15, 1)[0])
        a = rng.hermitian(dim)
        phi = 0.3 * rng.hermitian(dim)
        for name, f in _f_triple():
            r = pt.f_difference(a, phi, f)
            scale = 1.0 + op_norm(r.direct) + op_norm(r.doi)
            worst = max(worst, r.residual / scale)
    return _result(7, "f_difference_identity", worst, 1e-8,
                   "50 random (A, Phi) x {exp, sin, cauchy}, dims <= 16")


def criterion_daletskii_krein(seed: int) -> CriterionResult:
    """Derivative of f(H(s)) vs central differences on the built-in families."""
    rng = CounterRng(seed ^ 0x08)
    worst_rel = 0.0
    ratios = []
    for build in range(3):
        dim = 4 + int(rng.integers(0, 9, 1)[0])
        h0 = rng.hermitian(dim)
        if build == 0:
            path = pt.linear_path(h0, rng.hermitian(dim), s_domain=(-0.5, 1.5))
        elif build == 1:
            path = pt.polynomial_path(h0, [rng.hermitian(dim), 0.5 * rng.hermitian(dim)],
                                      s_domain=(-0.5, 1.5))
        else:
            path = pt.trig_path(h0, rng.hermitian(dim), omega=1.3, s_domain=(-0.5, 1.5))
        for s in (0.2, 0.8):
            if pt.min_eigenvalue_gap(path.hamiltonian(s)) < 1e-6:
                continue
            for name, f in _f_triple():
                dk = pt.dk_derivative(path, s, f)
                fd = pt.fd_derivative(path, s, f, h=1e-4)
                worst_rel = max(worst_rel, op_norm(dk - fd) / (1.0 + op_norm(dk)))
                e1 = op_norm(pt.fd_derivative(path, s, f, h=1e-3) - dk)
                e2 = op_norm(pt.fd_derivative(path, s, f, h=5e-4) - dk)
                if e1 > 1e-11:
                    ratios.append(e1 / e2)
    ratio_ok = bool(ratios) and all(3.0 <= r <= 5.0 for r in ratios)
    ok = worst_rel <= 1e-5 and ratio_ok
    lo = min(ratios) if ratios else np.nan
    hi = max(ratios) if ratios else np.nan
    return _result(8, "daletskii_krein_vs_finite_difference", worst_rel, 1e-5,
                   f"rel deviation at h=1e-4; h-halving ratios in [{lo:.2f}, {hi:.2f}] "
                   f"(need [3, 5])", ok=bool(ok))


def criterion_duhamel(seed: int) -> CriterionResult:
    """Propagator-sandwich quadrature vs the divided-difference route, |t| <= 5."""
    tl = md.two_level()
    worst = 0.0
    for t in (-5.0, -2.0, -0.5, 0.5, 1.3, 2.0, 5.0):
        for s in (0.25, 0.75):
            f_t = (lambda x, t=t: np.exp(1j * t * np.asarray(x)),
                   lambda x, t=t: 1j * t * np.exp(1j * t * np.asarray(x)))
            dk = pt.dk_derivative(tl.path, s, f_t)
            du = pt.duhamel_derivative(tl.path, s, t)
            worst = max(worst, op_norm(dk - du))
    return _result(9, "duhamel_formula", worst, 1e-8,
                   "two-level model, t in [-5, 5]")


def criterion_weight_function(seed: int) -> CriterionResult:
    """Normalization, Fourier support, and first moment for gamma in {0.5, 1, 2, 5}."""
    worst_norm = 0.0
    worst_supp = 0.0
    worst_first = 0.0
    for gamma in (0.5, 1.0, 2.0, 5.0):
        wf = fl.build_weight_function(gamma)
        worst_norm = max(worst_norm, abs(wf.norm - 1.0))
        xi = np.concatenate([np.linspace(1.05, 10.0, 40), [-1.5, -3.0, -7.5]]) * gamma
        worst_supp = max(worst_supp, float(np.max(np.abs(wf.fourier_reconstruction(xi)))))
        worst_first = max(worst_first, abs(wf.first_moment))
    ok = worst_norm <= 1e-8 and worst_supp <= 1e-6 and worst_first <= 1e-8
    return _result(10, "weight_function_contract", max(worst_norm, worst_supp), 1e-6,
                   f"norm err {worst_norm:.2e} (tol 1e-8), support leak "
                   f"{worst_supp:.2e} (tol 1e-6), first moment {worst_first:.2e} "
                   f"(tol 1e-8)", ok=ok)


def criterion_riesz(seed: int) -> CriterionResult:
    """Contour projector vs the direct spectral projector, 64 nodes, margin gamma/3."""
    rng = CounterRng(seed ^ 0x0B)
    worst = 0.0
    for trial in range(10):
        dim = 4 + int(rng.integers(0, 9, 1)[0])
        n_in = 1 + int(rng.integers(0, dim - 1, 1)[0])
        gamma = 1.0
        lower = -2.0 + rng.uniform(n_in)                 # inside cluster
        upper = gamma + rng.uniform(dim - n_in)          # rest, shifted past the gap
        vals = np.concatenate([np.sort(lower), np.sort(upper)])
        u = rng.unitary(dim)
        h = hermitian_part(u @ np.diag(vals) @ u.conj().T)
        direct = u[:, :n_in] @ u[:, :n_in].conj().T
        lo, hi = float(vals[0]) - 0.05, float(vals[n_in - 1]) + 0.05
        contour = fl.Contour(center=0.5 * (lo + hi), diameter=(hi - lo) + gamma,
                             n_nodes=64, min_margin=gamma / 3.0)
        p = fl.riesz_projection(h, contour)
        worst = max(worst, op_norm(p - direct))
    return _result(11, "riesz_projection", worst, 1e-10,
                   "contour vs direct spectral projector, 10 gapped instances")


def criterion_hastings_equivalence(seed: int) -> CriterionResult:
    """Closed-form vs nested-quadrature Hastings generator, 20 instances."""
    rng = CounterRng(seed ^ 0x0C)
    cases = []
    for trial in range(20):
        dim = 2 + int(rng.integers(0, 15, 1)[0])
        h0 = rng.hermitian(dim)
        h0 = h0 / max(1.0, op_norm(h0))
        v = rng.hermitian(dim)
        v = v / max(1.0, op_norm(v))
        gamma = float((2.0, 2.5, 3.0, 4.0)[trial % 4])
        s = float(rng.uniform(1)[0])
        cases.append((pt.linear_path(h0, v, s_domain=(0.0, 1.0)), s, gamma))

    wfs = {g: fl.build_weight_function(g) for g in (2.0, 2.5, 3.0, 4.0)}

    def run(case):
        path, s, gamma = case
        dc = fl.hastings_generator(path, s, wfs[gamma], method="closed_form")
        dq = fl.hastings_generator(path, s, wfs[gamma], method="quadrature")
        return op_norm(dc - dq)

    worst = max(run(case) for case in cases)
    return _result(12, "hastings_generator_equivalence", worst, 1e-6,
                   "closed form vs nested quadrature, 20 instances, dims <= 16")


def criterion_commutator_identity(seed: int) -> CriterionResult:
    """P'(s) = i [D(s), P(s)] against the contour derivative."""
    rng = CounterRng(seed ^ 0x0D)
    worst_small = 0.0
    for trial in range(3):
        dim = 4 + int(rng.integers(0, 13, 1)[0])
        model = md.random_gapped(dim=dim, gap=1.2, eps=0.12,
                                 seed=int(rng.integers(1, 2 ** 31, 1)[0]))
        wf = fl.build_weight_function(model.gamma)
        for s in np.linspace(0.1, 0.9, 5):
            chk = fl.commutator_identity_check(model.path, float(s), wf,
                                               model.interval_fn(float(s)))
            scale = 1.0 + op_norm(model.path.derivative(float(s)))
            worst_small = max(worst_small, chk.residual / scale)

    worst_tfim = 0.0
    for n_sites in (6, 8):
        model = md.tfim(n_sites)
        wf = fl.build_weight_function(model.gamma)
        for s in np.linspace(1.3, 1.9, 5):
            chk = fl.commutator_identity_check(
                model.path, float(s), wf, model.interval_fn(float(s)),
                fd_step=None if n_sites == 8 else 1e-3)
            scale = 1.0 + op_norm(model.path.derivative(float(s)))
            worst_tfim = max(worst_tfim, chk.residual / scale)
    ok = worst_small <= 1e-6 and worst_tfim <= 1e-5
    return _result(13, "hastings_commutator_identity", max(worst_small, worst_tfim),
                   1e-5, f"random gapped dims <= 16: {worst_small:.2e} (tol 1e-6); "
                   f"TFIM n in (6, 8): {worst_tfim:.2e} (tol 1e-5)", ok=ok)


def criterion_automorphic_equivalence(seed: int) -> CriterionResult:
    """Transported projector vs the spectral projector along the flow."""
    tl = md.two_level()
    wf = fl.build_weight_function(tl.gamma)
    res1 = fl.flow_integrate(tl.path, wf, tl.interval_fn,
                             np.linspace(0.0, 1.0, 1001), diagnostics=False)
    rep1 = fl.verify_automorphic_equivalence(res1)
    res2 = fl.flow_integrate(tl.path, wf, tl.interval_fn,
                             np.linspace(0.0, 1.0, 2001), diagnostics=False)
    rep2 = fl.verify_automorphic_equivalence(res2)
    ratio = rep1.max_error / max(rep2.max_error, 1e-300)

    tfim = md.tfim(6)
    wft = fl.build_weight_function(tfim.gamma)
    rest = fl.flow_integrate(tfim.path, wft, tfim.interval_fn,
                             np.linspace(*tfim.path.s_domain, 2001), diagnostics=False)
    rept = fl.verify_automorphic_equivalence(rest)

    ok = (rep1.max_error <= 1e-4 and 3.0 <= ratio <= 5.0
          and rep1.max_unitarity_defect <= 1e-8
          and rep2.max_unitarity_defect <= 1e-8
          and rep1.rank_constant and rep2.rank_constant and rept.rank_constant
          and rept.max_error <= 1e-3 and res1.failure is None
          and res2.failure is None and rest.failure is None)
    return _result(14, "automorphic_equivalence_transport", rep1.max_error, 1e-4,
                   f"two-level 1000 steps: {rep1.max_error:.2e} (tol 1e-4), "
                   f"halving ratio {ratio:.2f} (need [3, 5]), "
                   f"TFIM n=6 2000 steps: {rept.max_error:.2e} (tol 1e-3), "
                   f"unitarity defect {max(rep1.max_unitarity_defect, rept.max_unitarity_defect):.2e}",
                   ok=bool(ok))


def criterion_determinism(seed: int) -> CriterionResult:
    """Byte-identical report bodies for repeated runs with the same seed."""
    import contextlib
    import io
    import tempfile
    from pathlib import Path
    from .cli import main as cli_main

    cfg = ('{"command": "flow", "model": {"name": "two_level"}, '
           '"s_grid": {"start": 0.0, "end": 1.0, "steps": 100}, "seed": %d}' % seed)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cfg_path = tmp / "cfg.json"
        cfg_path.write_text(cfg)
        bodies = []
        for run in ("a", "b"):
            out = tmp / f"flow_{run}.csv"
            with contextlib.redirect_stdout(io.StringIO()):
                rc = cli_main(["flow", "--config", str(cfg_path),
                               "--output", str(out), "--no-figures"])
            if rc != 0:
                return _result(15, "report_determinism", 1.0, 0.0,
                               f"flow command exited {rc}", ok=False)
            lines = out.read_text().splitlines()
            bodies.append("\n".join(l for l in lines if not l.startswith("# generated")))
        identical = bodies[0] == bodies[1]
    return _result(15, "report_determinism", 0.0 if identical else 1.0, 0.0,
                   "two flow runs, identical seed, bodies compared "
                   "(timestamp comment excluded)", ok=identical)


CRITERIA: list = [
    criterion_pvm_axioms,
    criterion_polarization,
    criterion_doi_algebra,
    criterion_oracle_equivalence,
    criterion_norm_inequalities,
    criterion_exp_difference,
    criterion_f_difference,
    criterion_daletskii_krein,
    criterion_duhamel,
    criterion_weight_function,
    criterion_riesz,
    criterion_hastings_equivalence,
    criterion_commutator_identity,
    criterion_automorphic_equivalence,
    criterion_determinism,
]


def ordered_map(fn: Callable, items, workers: int = 1) -> list:
    """Map preserving order; thread pool when workers > 1 (results are merged
    by index, so the output is independent of the worker count)."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_all(seed: int = 1, workers: int = 1, progress: Callable | None = None) -> list:
    """Run every criterion; returns the list of CriterionResult in criterion
    order (independent of the worker count)."""

    def run_one(c):
        out = c(seed)
        if progress is not None:
            progress(out)
        return out

    if workers <= 1:
        return [run_one(c) for c in CRITERIA]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, c) for c in CRITERIA]
        return [f.result() for f in futures]
