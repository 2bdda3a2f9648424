"""Report emission: delimited data files, JSON summaries, and figures.

CSV layout: a `# doiflow <command>` comment line, a `# generated=<timestamp>`
comment line, a `# config=<canonical json>` comment line, then the header
and rows.  Only the generated= line varies between identical runs; every
other byte is identical for identical (config, seed).  Figures are rendered
next to each data file with the same stem.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _fmt(x) -> str:
    if isinstance(x, float):
        if np.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _config_line(config_echo: dict) -> str:
    return "# config=" + json.dumps(config_echo, sort_keys=True, separators=(",", ":"))


def write_csv(path, command: str, config_echo: dict, header: list, rows: list,
              notes: list | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    lines = [f"# doiflow {command}", f"# generated={stamp}",
             _config_line(config_echo)]
    for note in notes or ():
        lines.append(f"# note={note}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


FLOW_HEADER = ["s", "gap", "min_dist_to_contour", "commutator_residual",
               "transport_error", "unitarity_defect"]


def flow_rows(result) -> list:
    return [[d.s, d.gap, d.min_dist_to_contour, d.commutator_residual,
             d.transport_error, d.unitarity_defect] for d in result.diagnostics]


def write_flow_csv(path, result, config_echo: dict) -> None:
    write_csv(path, "flow", config_echo, FLOW_HEADER, flow_rows(result))


def write_weightfn_csv(path, wf, config_echo: dict, n_t_samples: int = 201,
                       n_xi_samples: int = 121) -> None:
    """Tables of (t, w(t)) and (xi, reconstructed what(xi)) plus the scalar
    contract rows (normalization, first moment, first absolute moment)."""
    rows = [["normalization", 0.0, wf.norm],
            ["first_moment", 0.0, wf.first_moment],
            ["abs_first_moment", 0.0, wf.abs_first_moment]]
    t_show = np.linspace(-30.0 / wf.gamma, 30.0 / wf.gamma, n_t_samples)
    for t, w in zip(t_show, wf.w(t_show)):
        rows.append(["w", float(t), float(w)])
    xi_show = np.linspace(-12.0 * wf.gamma, 12.0 * wf.gamma, n_xi_samples)
    for xi in xi_show:
        rows.append(["what_reconstructed", float(xi), float(wf.fourier_reconstruction(xi))])
    write_csv(path, "weightfn", config_echo, ["quantity", "arg", "value"], rows)


def write_table_csv(path, command: str, config_echo: dict, header: list, rows: list,
                    notes: list | None = None) -> None:
    write_csv(path, command, config_echo, header, rows, notes=notes)


def write_verify_json(path, results, config_echo: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "criteria": [
            {"criterion_id": r.criterion_id, "name": r.name, "status": r.status,
             "measured": r.measured, "tolerance": r.tolerance, "detail": r.detail}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
        "config": config_echo,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


# ---------------------------------------------------------------------------
# figures (rendered alongside the delimited output)
# ---------------------------------------------------------------------------

def _axes_grid(n_panels: int):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    cols = 2 if n_panels > 1 else 1
    rows = (n_panels + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(5.0 * cols, 3.4 * rows))
    axes = np.atleast_1d(axes).ravel()
    for ax in axes[n_panels:]:
        ax.set_visible(False)
    return fig, axes


def _figure_path(data_path) -> Path:
    data_path = Path(data_path)
    return data_path.with_suffix(".png")


def render_flow_figure(path, result) -> Path:
    """Gap, contour clearance, and the error diagnostics along the flow."""
    fig, axes = _axes_grid(4)
    s = [d.s for d in result.diagnostics]
    panels = [
        ("spectral gap", [d.gap for d in result.diagnostics], "linear"),
        ("min distance to contour", [d.min_dist_to_contour for d in result.diagnostics], "linear"),
        ("commutator residual", [d.commutator_residual for d in result.diagnostics], "log"),
        ("transport error / unitarity defect", None, "log"),
    ]
    for ax, (title, ys, scale) in zip(axes, panels):
        if ys is not None:
            ax.plot(s, ys, lw=1.0)
        else:
            ax.plot(s, [max(d.transport_error, 1e-18) for d in result.diagnostics],
                    lw=1.0, label="transport")
            ax.plot(s, [max(d.unitarity_defect, 1e-18) for d in result.diagnostics],
                    lw=1.0, ls="--", label="unitarity")
            ax.legend(fontsize=8)
        ax.set_yscale(scale)
        ax.set_xlabel("s")
        ax.set_title(title, fontsize=10)
    out = _figure_path(path)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    _close(fig)
    return out


def render_weightfn_figure(path, wf) -> Path:
    fig, axes = _axes_grid(2)
    ts = np.linspace(-30.0 / wf.gamma, 30.0 / wf.gamma, 801)
    axes[0].plot(ts, wf.w(ts), lw=1.0)
    axes[0].set_title(f"w(t), gamma = {wf.gamma}", fontsize=10)
    axes[0].set_xlabel("t")
    xis = np.linspace(-3.0 * wf.gamma, 3.0 * wf.gamma, 601)
    axes[1].plot(xis, wf.fourier_reconstruction(xis), lw=1.0, label="reconstructed")
    axes[1].plot(xis, wf.profile(xis), lw=0.8, ls="--", label="profile")
    axes[1].axvline(-wf.gamma, color="gray", lw=0.6)
    axes[1].axvline(wf.gamma, color="gray", lw=0.6)
    axes[1].set_title("Fourier transform and support", fontsize=10)
    axes[1].set_xlabel("xi")
    axes[1].legend(fontsize=8)
    out = _figure_path(path)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    _close(fig)
    return out


def render_residual_figure(path, title: str, labels: list, values: list,
                           tolerances: list | None = None) -> Path:
    """Log-scale residual scatter for check batteries (doi / dk / verify)."""
    fig, axes = _axes_grid(1)
    ax = axes[0]
    xs = np.arange(len(values))
    ax.semilogy(xs, [max(v, 1e-18) for v in values], "o", ms=3.5, label="measured")
    if tolerances is not None:
        ax.semilogy(xs, tolerances, "_", color="red", ms=10, label="tolerance")
        ax.legend(fontsize=8)
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_title(title, fontsize=10)
    out = _figure_path(path)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    _close(fig)
    return out


def _close(fig) -> None:
    import matplotlib.pyplot as plt
    plt.close(fig)
