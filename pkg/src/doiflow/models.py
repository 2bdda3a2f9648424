"""Built-in Hamiltonian paths with isolated spectral components.

Each model bundles an OperatorPath with the tracked interval I(s) (explicit
function of s, continuous endpoints) and a gap gamma validated by an
eigenvalue sweep over the declared s-domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, GapError
from .flow import detect_patch
from .linalg import hermitian_part, op_norm
from .perturbation import OperatorPath, linear_path
from .pvm import pvm_from_hermitian
from .rng import CounterRng

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class ModelBundle:
    """An operator path plus the spectral-patch data the flow needs."""

    name: str
    path: OperatorPath
    interval_fn: Callable
    gamma: float
    params: dict

    def validate(self, n_sweep: int = 33) -> None:
        """Check the patch assumptions at evenly spaced s over the domain."""
        lo, hi = self.path.s_domain
        for s in np.linspace(lo, hi, n_sweep):
            pvm = pvm_from_hermitian(self.path.hamiltonian(s))
            detect_patch(pvm, self.interval_fn(s), self.gamma)


def two_level(coupling: float = 1.0, s_domain=(0.0, 1.0)) -> ModelBundle:
    """H(s) = sigma_z + coupling * s * sigma_x, eigenvalues +-sqrt(1 + (ks)^2).

    Tracks the lower level with I(s) = [-sqrt(1 + (ks)^2) - 1/4, 0].  The
    distance from I(s) to the upper level is sqrt(1 + (ks)^2) >= 1, so
    gamma = 0.9 holds whenever coupling * max|s| <= 1.
    """
    kappa = float(coupling)
    lo, hi = float(s_domain[0]), float(s_domain[1])
    if kappa * max(abs(lo), abs(hi)) > 1.0 + 1e-12:
        raise ConfigError("two_level requires coupling * max|s| <= 1")
    path = linear_path(PAULI_Z, kappa * PAULI_X, s_domain=(lo, hi))

    def interval_fn(s):
        e = np.sqrt(1.0 + (kappa * s) ** 2)
        return (-e - 0.25, 0.0)

    return ModelBundle(name="two_level", path=path, interval_fn=interval_fn,
                       gamma=0.9, params={"coupling": kappa})


def random_gapped(dim: int = 8, gap: float = 1.0, eps: float = 0.1,
                  seed: int = 1, s_domain=(0.0, 1.0)) -> ModelBundle:
    """Seeded Hermitian H0 with two spectral blocks separated by ``gap``,
    perturbed by Phi(s) = s * eps * V with ||V||_op = 1.

    H0 = W diag(D) W* for a seeded unitary W, with dim//2 diagonal values
    uniform in [-1 - gap/2, -gap/2] and the rest in [gap/2, 1 + gap/2].
    Weyl's inequality keeps the two groups separated by at least
    gap - 2 * eps * max|s|, so eps * max|s| <= gap/4 guarantees gap/2;
    gamma is set to 0.45 * gap against the fixed interval
    I = [-1 - 3 gap/4 - 0.1, -gap/4].
    """
    dim = int(dim)
    if dim < 2:
        raise ConfigError("random_gapped requires dim >= 2")
    gap = float(gap)
    eps = float(eps)
    lo, hi = float(s_domain[0]), float(s_domain[1])
    if eps * max(abs(lo), abs(hi)) > gap / 4.0 + 1e-12:
        raise ConfigError("random_gapped requires eps * max|s| <= gap/4")

    rng = CounterRng(seed)
    n_lo = dim // 2
    lower = -1.0 - gap / 2.0 + rng.uniform(n_lo)            # in [-1 - g/2, -g/2]
    upper = gap / 2.0 + rng.uniform(dim - n_lo)             # in [g/2, 1 + g/2]
    diag = np.concatenate([np.sort(lower), np.sort(upper)])
    w = rng.unitary(dim)
    h0 = hermitian_part(w @ np.diag(diag) @ w.conj().T)
    v = rng.hermitian(dim)
    v = v / op_norm(v)
    path = linear_path(h0, eps * v, s_domain=(lo, hi))

    interval = (-1.0 - 0.75 * gap - 0.1, -0.25 * gap)
    return ModelBundle(name="random_gapped", path=path,
                       interval_fn=lambda s: interval, gamma=0.45 * gap,
                       params={"dim": dim, "gap": gap, "eps": eps, "seed": int(seed)})


def _kron_chain(ops) -> np.ndarray:
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def tfim_operators(n_sites: int):
    """(sum of Z_i Z_{i+1} over the open chain, sum of X_i) as dense matrices."""
    eye = np.eye(2, dtype=complex)
    dim = 2 ** n_sites
    zz = np.zeros((dim, dim), dtype=complex)
    for i in range(n_sites - 1):
        ops = [eye] * n_sites
        ops[i] = PAULI_Z
        ops[i + 1] = PAULI_Z
        zz += _kron_chain(ops)
    x_total = np.zeros((dim, dim), dtype=complex)
    for i in range(n_sites):
        ops = [eye] * n_sites
        ops[i] = PAULI_X
        x_total += _kron_chain(ops)
    return zz, x_total


def tfim(n_sites: int = 6, s_domain=(1.2, 2.0), gap_sweep: int = 33,
         safety: float = 0.9) -> ModelBundle:
    """Open transverse-field Ising chain H(s) = -sum Z_i Z_{i+1} - s sum X_i,
    tracking the ground level.

    The default domain stays on the strong-field side where the lowest
    eigenvalue is isolated (the ferromagnetic pair is exponentially split
    near s = 0, so small s is excluded).  gamma is estimated from an
    s-sweep: with g_min the minimal gap E_1 - E_0 over the sweep, the
    interval is I(s) = [E_0(s) - 1, E_0(s) + g_min/4] and
    gamma = safety * (g_min - g_min/4).
    """
    n_sites = int(n_sites)
    if not 2 <= n_sites <= 8:
        raise ConfigError("tfim supports 2 to 8 sites")
    lo, hi = float(s_domain[0]), float(s_domain[1])
    zz, x_total = tfim_operators(n_sites)
    h0 = -zz
    v = -x_total
    path = linear_path(h0, v, s_domain=(lo, hi))

    g_min = np.inf
    for s in np.linspace(lo, hi, int(gap_sweep)):
        vals = np.linalg.eigvalsh(path.hamiltonian(s))
        g_min = min(g_min, float(vals[1] - vals[0]))
    if g_min <= 0:
        raise GapError("tfim ground level is degenerate on the requested domain")
    margin = 0.25 * g_min
    gamma = safety * (g_min - margin)

    def interval_fn(s):
        vals = np.linalg.eigvalsh(path.hamiltonian(s))
        return (float(vals[0]) - 1.0, float(vals[0]) + margin)

    return ModelBundle(name="tfim", path=path, interval_fn=interval_fn, gamma=gamma,
                       params={"n_sites": n_sites, "g_min": g_min})


MODEL_BUILDERS = {
    "two_level": two_level,
    "random_gapped": random_gapped,
    "tfim": tfim,
}


def build_model(name: str, params: dict, s_domain) -> ModelBundle:
    if name not in MODEL_BUILDERS:
        raise ConfigError(f"unknown model name {name!r} (model.name)")
    builder = MODEL_BUILDERS[name]
    try:
        return builder(s_domain=s_domain, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {name!r}: {exc}") from exc
