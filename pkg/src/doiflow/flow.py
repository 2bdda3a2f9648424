"""Gapped spectral flow: weight functions, Riesz projections, the Hastings
generator, and the transport of spectral projections.

Setting: a path H(s) = H0 + Phi(s) with an isolated spectral component
sigma_1(s) = spectrum inside a compact interval I(s), separated from the
rest by a gap of at least gamma.  P(s) is the projection onto sigma_1(s),
available two ways: directly from the spectral measure, or as the resolvent
contour integral

    P(s) = -(1/2 pi i) * closed integral of (H(s) - z)^(-1) dz

over the circle centered at the midpoint of I(s) with diameter |I(s)| + gamma
(trapezoidal rule; geometric convergence since the integrand is analytic and
periodic in the angle).  Its s-derivative has the contour form

    P'(s) = +(1/2 pi i) * closed integral of R(z,s) Phi'(s) R(z,s) dz.

The Hastings generator is

    D(s) = integral w(t) integral_0^t e^(iuH) Phi'(s) e^(-iuH) du dt

for a real even weight w with unit mass whose Fourier transform
what(xi) = integral w(t) e^(-i xi t) dt vanishes for |xi| > gamma.  In the
eigenbasis of H(s) this is the Schur multiplier with spectral kernel

    W(omega) = (what(omega) - 1) / (i omega),   W(0) = 0,

which equals i/omega across the gap (where what vanishes), so

    P'(s) = i [D(s), P(s)]

holds exactly; integrating U'(s) = i D(s) U(s) transports P:
P(s) = U(s) P(s0) U(s)*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (ContourError, GapError, InvalidInput, PatchError,
                     QuadratureError, TruncationError)
from .kernels import Kernel
from .linalg import EigenDecomposition, hermitian_eig, hermitian_part, op_norm
from .perturbation import OperatorPath
from .pvm import FinitePVM, cluster_eigenvalues
from .quadrature import composite_gauss_legendre, gauss_legendre


# ---------------------------------------------------------------------------
# weight function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """Real even weight w(t) with unit mass and Fourier support in [-gamma, gamma].

    Built from an even smooth profile what(xi) supported on (-gamma, gamma)
    with what(0) = 1 via the cosine transform

        w(t) = (1/2 pi) integral_{-gamma}^{gamma} what(xi) cos(xi t) dxi,

    held as values on a symmetric composite Gauss-Legendre grid over
    [-t_max, t_max] dense enough to reconstruct what out to ~11 gamma.
    """

    gamma: float
    t_max: float
    profile: Callable = field(repr=False)
    xi_nodes: np.ndarray = field(repr=False)
    xi_weights: np.ndarray = field(repr=False)
    t_nodes: np.ndarray = field(repr=False)
    t_weights: np.ndarray = field(repr=False)
    w_values: np.ndarray = field(repr=False)
    norm: float
    first_moment: float
    abs_first_moment: float

    def w(self, t):
        """Evaluate w at arbitrary points from the xi-rule (vectorized)."""
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.empty(flat.shape)
        coeff = self.profile(self.xi_nodes) * self.xi_weights / (2.0 * np.pi)
        for i in range(0, flat.size, 4096):
            chunk = flat[i:i + 4096]
            out[i:i + 4096] = coeff @ np.cos(np.outer(self.xi_nodes, chunk))
        return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)

    def fourier_reconstruction(self, xi):
        """integral w(t) e^(-i xi t) dt from the stored t-grid (real part; w even)."""
        xi = np.asarray(xi, dtype=float)
        flat = np.atleast_1d(xi).ravel()
        out = np.array([float(np.dot(self.t_weights * self.w_values, np.cos(x * self.t_nodes)))
                        for x in flat])
        return float(out[0]) if xi.ndim == 0 else out.reshape(xi.shape)


def bump_profile(gamma: float, sharpness: float = 1.0) -> Callable:
    """Even smooth profile exp(sharpness * (1 - 1/(1 - (xi/gamma)^2))) on
    (-gamma, gamma), zero outside, equal to 1 at xi = 0."""

    def profile(xi):
        u = np.asarray(xi, dtype=float) / gamma
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(sharpness * (1.0 - 1.0 / (1.0 - ui ** 2)))
        return out

    return profile


def build_weight_function(gamma: float, profile_sharpness: float = 1.0,
                          fourier_nodes: int = 200, t_max_factor: float = 400.0,
                          tail_rel_tol: float = 1e-6) -> WeightFunction:
    """Construct the weight function for a given gap gamma.

    fourier_nodes is a floor: the xi-rule is enlarged to resolve cos(xi t)
    out to t_max = t_max_factor / gamma (about 0.7 * gamma * t_max + 32
    nodes).  The t-grid uses 12 panels per wavelength 2 pi / gamma so the
    Fourier reconstruction stays accurate out to ~11 gamma.  Raises
    TruncationError if the mass of |t w(t)| beyond t_max exceeds
    tail_rel_tol of the total.
    """
    if gamma <= 0:
        raise InvalidInput("gamma must be positive")
    if fourier_nodes < 2:
        raise InvalidInput("fourier_nodes must be >= 2")
    t_max = t_max_factor / gamma
    profile = bump_profile(gamma, profile_sharpness)

    n_xi = max(int(fourier_nodes), int(np.ceil(0.7 * gamma * t_max)) + 32)
    xi_nodes, xi_weights = gauss_legendre(-gamma, gamma, n_xi)

    wavelength = 2.0 * np.pi / gamma
    n_panels = int(np.ceil(2.0 * t_max / (wavelength / 12.0)))
    if n_panels % 2:
        n_panels += 1  # symmetric grid: even w and zero first moment by construction
    t_nodes, t_weights = composite_gauss_legendre(-t_max, t_max, n_panels, 8)

    coeff = profile(xi_nodes) * xi_weights / (2.0 * np.pi)
    w_values = np.empty_like(t_nodes)
    for i in range(0, t_nodes.size, 4096):
        w_values[i:i + 4096] = coeff @ np.cos(np.outer(xi_nodes, t_nodes[i:i + 4096]))

    norm = float(t_weights @ w_values)
    first = float(t_weights @ (t_nodes * w_values))
    absmom = float(t_weights @ np.abs(t_nodes * w_values))

    # estimate the omitted |t w| mass on [t_max, 3 t_max] (trapezoid on a
    # grid with ~4 samples per oscillation; the xi-rule is enlarged to stay
    # accurate out there)
    n_ext = max(int(np.ceil(2.0 * t_max * gamma * 4.0 / (2.0 * np.pi))), 64)
    ext = np.linspace(t_max, 3.0 * t_max, n_ext)
    n_xi_ext = int(np.ceil(0.7 * gamma * 3.0 * t_max)) + 32
    xi_e, wxi_e = gauss_legendre(-gamma, gamma, n_xi_ext)
    coeff_e = profile(xi_e) * wxi_e / (2.0 * np.pi)
    w_ext = coeff_e @ np.cos(np.outer(xi_e, ext))
    tail = 2.0 * float(np.trapezoid(np.abs(ext * w_ext), ext))
    if tail > tail_rel_tol * max(absmom, 1e-300):
        raise TruncationError(
            f"|t w(t)| mass beyond t_max = {t_max:.3g} is {tail:.2e} "
            f"({tail / absmom:.2e} of the total); increase t_max_factor"
        )

    return WeightFunction(
        gamma=float(gamma), t_max=float(t_max), profile=profile,
        xi_nodes=xi_nodes, xi_weights=xi_weights,
        t_nodes=t_nodes, t_weights=t_weights, w_values=w_values,
        norm=norm, first_moment=first, abs_first_moment=absmom,
    )


# ---------------------------------------------------------------------------
# spectral patches and contours
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPatch:
    """An isolated spectral component: atoms inside a compact interval,
    separated from the remaining atoms by at least gamma."""

    interval: tuple
    gamma: float
    locations: np.ndarray
    inside: np.ndarray
    outside: np.ndarray
    projector: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projector).real))

    @property
    def gap(self) -> float:
        """Distance from the interval to the nearest outside atom."""
        lo, hi = self.interval
        xs = self.locations[self.outside]
        if xs.size == 0:
            return np.inf
        return float(np.min(np.maximum(lo - xs, xs - hi)))


def detect_patch(spectral, interval, gamma: float) -> SpectralPatch:
    """Partition atoms by the interval and validate the gamma-gap.

    ``spectral`` may be a FinitePVM or an EigenDecomposition (clustered with
    the default tolerance).  Raises PatchError when either side is empty,
    GapError when an outside atom is closer than gamma to the interval.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise InvalidInput(f"empty interval ({lo}, {hi})")
    if isinstance(spectral, FinitePVM):
        xs = spectral.locations
        groups = None
    else:
        groups = cluster_eigenvalues(spectral.eigenvalues)
        xs = np.array([float(np.mean(spectral.eigenvalues[g])) for g in groups])
    inside = np.where((xs >= lo) & (xs <= hi))[0]
    outside = np.where((xs < lo) | (xs > hi))[0]
    if inside.size == 0:
        raise PatchError(f"no atoms inside [{lo}, {hi}]")
    if outside.size == 0:
        raise PatchError(f"no atoms outside [{lo}, {hi}]")
    dists = np.maximum(lo - xs[outside], xs[outside] - hi)
    worst = float(np.min(dists))
    if worst < gamma:
        x_bad = xs[outside][np.argmin(dists)]
        raise GapError(
            f"atom at {x_bad:.6g} is {worst:.6g} from [{lo:.6g}, {hi:.6g}], "
            f"below the required gap {gamma:.6g}"
        )
    if isinstance(spectral, FinitePVM):
        projector = spectral.projector_for(inside)
    else:
        cols = np.concatenate([groups[i] for i in inside])
        vecs = spectral.vectors[:, cols]
        projector = vecs @ vecs.conj().T
    return SpectralPatch(
        interval=(lo, hi), gamma=float(gamma), locations=xs,
        inside=inside, outside=outside, projector=projector,
    )


def auto_interval(spectral, pad_fraction: float = 0.25):
    """Heuristic tracked interval: cover the atoms below the largest spectral
    gap, padded by pad_fraction of that gap.

    This guesses which component to track; prefer an explicit interval
    whenever the scenario defines one (the built-in models do).
    """
    if isinstance(spectral, FinitePVM):
        xs = spectral.locations
    else:
        xs = np.asarray(spectral.eigenvalues, dtype=float)
    if len(xs) < 2:
        raise PatchError("need at least two atoms to split the spectrum")
    gaps = np.diff(xs)
    k = int(np.argmax(gaps))
    pad = pad_fraction * float(gaps[k])
    return (float(xs[0]) - pad, float(xs[k]) + pad)


@dataclass(frozen=True)
class Contour:
    """Circle center + diameter/2 * e^(i theta) with n_nodes trapezoid nodes.

    min_margin is the validation threshold: every eigenvalue must be at
    least this far from the circle.
    """

    center: float
    diameter: float
    n_nodes: int = 64
    min_margin: float = 0.0

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    def nodes(self):
        """(z_k, dz_k) with dz_k = Gamma'(theta_k) * dtheta for the trapezoid rule."""
        theta = 2.0 * np.pi * np.arange(self.n_nodes) / self.n_nodes
        z = self.center + self.radius * np.exp(1j * theta)
        dz = 1j * self.radius * np.exp(1j * theta) * (2.0 * np.pi / self.n_nodes)
        return z, dz

    def distance(self, x) -> np.ndarray:
        """Distance from real points to the circle."""
        return np.abs(np.abs(np.asarray(x, dtype=float) - self.center) - self.radius)


def contour_for_patch(patch: SpectralPatch, n_nodes: int = 64) -> Contour:
    """Circle centered at the interval midpoint, diameter |I| + gamma."""
    lo, hi = patch.interval
    return Contour(center=0.5 * (lo + hi), diameter=(hi - lo) + patch.gamma,
                   n_nodes=int(n_nodes), min_margin=patch.gamma / 3.0)


def _validate_contour(contour: Contour, eigenvalues: np.ndarray) -> None:
    d = contour.distance(eigenvalues)
    worst = float(np.min(d))
    if worst < contour.min_margin:
        x = eigenvalues[np.argmin(d)]
        raise ContourError(
            f"eigenvalue {x:.6g} is {worst:.3g} from the contour, "
            f"below the margin {contour.min_margin:.3g}"
        )


def riesz_projection(h, contour: Contour) -> np.ndarray:
    """-(1/2 pi i) * trapezoid sum of (H - z_k)^(-1) dz_k over the circle.

    Resolvents are computed by direct linear solves, independent of any
    eigendecomposition.  Eigenvalues are used only to validate the margin.
    """
    h = hermitian_part(h)
    _validate_contour(contour, np.linalg.eigvalsh(h))
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    z, dz = contour.nodes()
    acc = np.zeros((n, n), dtype=complex)
    for zk, dzk in zip(z, dz):
        acc += np.linalg.solve(h - zk * eye, eye) * dzk
    p = acc * (-1.0 / (2.0j * np.pi))
    return hermitian_part(p)


def projection_derivative_contour(spectral, dphi, contour: Contour) -> np.ndarray:
    """P'(s) = +(1/2 pi i) * trapezoid sum of R(z) Phi' R(z) dz.

    Given a matrix, resolvents come from linear solves (independent of any
    eigensolver); given an EigenDecomposition, the same trapezoid sum is
    evaluated spectrally, entrywise in the eigenbasis.
    """
    z, dz = contour.nodes()
    if isinstance(spectral, EigenDecomposition):
        lam = spectral.eigenvalues
        _validate_contour(contour, lam)
        # sum_k dz_k / ((lam_i - z_k)(lam_j - z_k)), entrywise over (i, j)
        recip = 1.0 / (lam[:, None] - z[None, :])          # (n, nodes)
        m = (recip * dz[None, :]) @ recip.T
        w_eig = spectral.vectors.conj().T @ dphi @ spectral.vectors
        acc = spectral.vectors @ ((m / (2.0j * np.pi)) * w_eig) @ spectral.vectors.conj().T
        return hermitian_part(acc)
    h = hermitian_part(spectral)
    _validate_contour(contour, np.linalg.eigvalsh(h))
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    acc = np.zeros((n, n), dtype=complex)
    for zk, dzk in zip(z, dz):
        r = np.linalg.solve(h - zk * eye, eye)
        acc += (r @ dphi @ r) * dzk
    return hermitian_part(acc / (2.0j * np.pi))


# ---------------------------------------------------------------------------
# Hastings generator
# ---------------------------------------------------------------------------

def hastings_kernel(wf: WeightFunction) -> Kernel:
    """Spectral kernel of the Hastings generator:

        W(omega) = (what(omega) - 1) / (i omega)  for omega = x - y != 0,
        W(0) = 0 (the first moment of an even weight),

    equal to i/omega for |omega| >= gamma where the profile vanishes.
    W(-omega) = conj(W(omega)), so the induced multiplier maps Hermitian
    matrices to Hermitian matrices.
    """

    def evaluate(x, y):
        omega = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        small = np.abs(omega) < 1e-12
        denom = np.where(small, 1.0, omega)
        vals = np.where(small, 0.0, (wf.profile(omega) - 1.0) / (1j * denom))
        return vals if vals.ndim else complex(vals)

    return Kernel(evaluate, label=f"hastings gamma={wf.gamma}", vectorized=True)


def _hastings_closed(eig: EigenDecomposition, dphi, wf: WeightFunction) -> np.ndarray:
    """Schur-multiply Phi' by the spectral kernel W in the eigenbasis of H."""
    lam = eig.eigenvalues
    omega = lam[:, None] - lam[None, :]
    small = np.abs(omega) < 1e-12
    denom = np.where(small, 1.0, omega)
    k = np.where(small, 0.0, (wf.profile(omega) - 1.0) / (1j * denom))
    w_eig = eig.vectors.conj().T @ dphi @ eig.vectors
    return hermitian_part(eig.vectors @ (k * w_eig) @ eig.vectors.conj().T)


def hastings_generator(path: OperatorPath, s: float, wf: WeightFunction,
                       method: str = "closed_form", t_nodes: int = 400,
                       u_nodes: int = 64) -> np.ndarray:
    """The Hastings generator D(s), Hermitian.

    method "closed_form" applies the spectral kernel as a double operator
    integral (exact up to eigensolver error).  method "quadrature" evaluates
    the nested Bochner integral

        integral w(t) integral_0^t e^(iuH) Phi' e^(-iuH) du dt

    by composite Gauss-Legendre in t and Gauss-Legendre in u on each [0, t],
    in the eigenbasis of H(s).  t_nodes / u_nodes are floors; both rules are
    refined automatically to resolve the oscillation gamma + spectral
    diameter (outer) and |t| * diameter (inner).
    """
    path.check_s(s)
    h = path.hamiltonian(s)
    dphi = path.derivative(s)
    if method == "closed_form":
        return _hastings_closed(hermitian_eig(h), dphi, wf)
    if method != "quadrature":
        raise InvalidInput(f"unknown Hastings generator method {method!r}")

    eig = hermitian_eig(h)
    lam = eig.eigenvalues
    diam = float(lam[-1] - lam[0]) if len(lam) > 1 else 0.0
    omega = (lam[:, None] - lam[None, :]).ravel()

    # w and the grid are even in t, and the inner integral flips to its
    # conjugate under t -> -t, so integrate over t > 0 and keep 2i Im(.)
    t_cut = wf.t_max
    max_freq = wf.gamma + diam
    n_panels = max(int(np.ceil(t_cut * max_freq / 6.0)),
                   int(np.ceil(t_nodes / 16)), 2)
    tg, tw = composite_gauss_legendre(0.0, t_cut, n_panels, 8)
    w_at_t = wf.w(tg)

    norm_check = 2.0 * float(tw @ w_at_t)
    if abs(norm_check - 1.0) > 1e-6:
        raise QuadratureError(
            f"t-rule integrates w to {norm_check:.9f}; increase t_nodes"
        )

    kernel_sum = np.zeros(omega.shape, dtype=complex)
    for t, wq, wt in zip(tg, tw, w_at_t):
        scale = wq * wt
        if scale == 0.0 or t == 0.0:
            continue
        n_pan_u = max(int(np.ceil(u_nodes / 8)), int(np.ceil(t * diam / 6.0)))
        us, uw = composite_gauss_legendre(0.0, t, n_pan_u, 8)
        inner = uw @ np.exp(1j * np.outer(us, omega))
        kernel_sum += (2j * scale) * inner.imag

    w_eig = eig.vectors.conj().T @ dphi @ eig.vectors
    d_eig = kernel_sum.reshape(len(lam), len(lam)) * w_eig
    d = eig.vectors @ d_eig @ eig.vectors.conj().T
    return hermitian_part(d)


# ---------------------------------------------------------------------------
# commutator identity and the flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorCheck:
    residual: float            # ||P'_contour - i[D, P]||
    fd_residual: float         # ||P'_contour - P'_finite_difference||
    p_prime_contour: np.ndarray
    commutator_term: np.ndarray
    p_prime_fd: np.ndarray | None


def commutator_identity_check(path: OperatorPath, s: float, wf: WeightFunction,
                              interval, contour_nodes: int = 64,
                              fd_step: float | None = 1e-3) -> CommutatorCheck:
    """Compare P'(s) from the resolvent contour against i[D(s), P(s)], and
    cross-check the contour derivative against a 4th-order central finite
    difference of the Riesz projection (fd_step=None skips the stencil)."""
    path.check_s(s)
    h = path.hamiltonian(s)
    dphi = path.derivative(s)
    eig = hermitian_eig(h)
    patch = detect_patch(eig, interval, wf.gamma)
    contour = contour_for_patch(patch, contour_nodes)

    p_prime = projection_derivative_contour(h, dphi, contour)
    d = hastings_generator(path, s, wf, method="closed_form")
    comm = 1j * (d @ patch.projector - patch.projector @ d)
    comm = hermitian_part(comm)
    residual = op_norm(p_prime - comm)

    p_prime_fd = None
    fd_residual = np.nan
    if fd_step is not None:
        hstep = float(fd_step)
        path.check_s(s, pad=2.0 * hstep)
        stencil = []
        for k in (-2, -1, 1, 2):
            stencil.append(riesz_projection(path.hamiltonian(s + k * hstep), contour))
        pm2, pm1, pp1, pp2 = stencil
        p_prime_fd = (-pp2 + 8.0 * pp1 - 8.0 * pm1 + pm2) / (12.0 * hstep)
        fd_residual = op_norm(p_prime - p_prime_fd)

    return CommutatorCheck(residual=residual, fd_residual=fd_residual,
                           p_prime_contour=p_prime, commutator_term=comm,
                           p_prime_fd=p_prime_fd)


@dataclass(frozen=True)
class FlowStepDiagnostics:
    s: float
    gap: float
    min_dist_to_contour: float
    commutator_residual: float
    transport_error: float
    unitarity_defect: float


@dataclass
class FlowResult:
    """Output of the spectral flow: unitaries and patches on the s-grid.

    On a gap failure mid-flow the result is partial and ``failure`` records
    the step and reason.
    """

    s_grid: np.ndarray
    unitaries: list
    patches: list
    diagnostics: list
    failure: str | None = None

    @property
    def completed(self) -> int:
        return len(self.unitaries)

    def transport_errors(self) -> np.ndarray:
        p0 = self.patches[0].projector
        return np.array([
            op_norm(u @ p0 @ u.conj().T - patch.projector)
            for u, patch in zip(self.unitaries, self.patches)
        ])


def flow_integrate(path: OperatorPath, wf: WeightFunction, interval_fn: Callable,
                   s_grid, stepper: str = "midpoint_exponential",
                   contour_nodes: int = 64, diagnostics: bool = True) -> FlowResult:
    """Integrate U'(s) = i D(s) U(s), U(s0) = 1, with the exponential midpoint
    stepper U_{k+1} = exp(i h D(s_k + h/2)) U_k (unitary by construction).

    The patch is validated at every grid point; a GapError aborts the flow
    and returns the partial result with a failure record.
    """
    if stepper != "midpoint_exponential":
        raise InvalidInput(f"unknown stepper {stepper!r}")
    s_grid = np.asarray(s_grid, dtype=float)
    if len(s_grid) < 1 or np.any(np.diff(s_grid) <= 0):
        raise InvalidInput("s_grid must be nonempty and strictly increasing")

    unitaries: list = []
    patches: list = []
    diags: list = []
    failure = None
    dim = np.asarray(path.h0).shape[0]
    u = np.eye(dim, dtype=complex)
    p0 = None

    for k, s in enumerate(s_grid):
        try:
            eig = hermitian_eig(path.hamiltonian(s))
            patch = detect_patch(eig, interval_fn(s), wf.gamma)
        except (GapError, PatchError) as exc:
            failure = f"step {k} (s = {s:.6g}): {exc}"
            break
        if p0 is None:
            p0 = patch.projector
        unitaries.append(u.copy())
        patches.append(patch)

        if diagnostics:
            contour = contour_for_patch(patch, contour_nodes)
            dist = float(np.min(contour.distance(eig.eigenvalues)))
            dphi = path.derivative(s)
            dgen = _hastings_closed(eig, dphi, wf)
            p_prime = projection_derivative_contour(eig, dphi, contour)
            comm = hermitian_part(1j * (dgen @ patch.projector - patch.projector @ dgen))
            comm_res = op_norm(p_prime - comm)
            transport = op_norm(u @ p0 @ u.conj().T - patch.projector)
            udefect = op_norm(u.conj().T @ u - np.eye(dim))
            diags.append(FlowStepDiagnostics(
                s=float(s), gap=patch.gap, min_dist_to_contour=dist,
                commutator_residual=comm_res, transport_error=transport,
                unitarity_defect=udefect,
            ))

        if k + 1 < len(s_grid):
            h_step = s_grid[k + 1] - s_grid[k]
            s_mid = s_grid[k] + 0.5 * h_step
            eig_mid = hermitian_eig(path.hamiltonian(s_mid))
            d_mid = _hastings_closed(eig_mid, path.derivative(s_mid), wf)
            eig_d = hermitian_eig(d_mid)
            phases = np.exp(1j * h_step * eig_d.eigenvalues)
            step = (eig_d.vectors * phases) @ eig_d.vectors.conj().T
            u = step @ u

    return FlowResult(s_grid=s_grid[:len(unitaries)], unitaries=unitaries,
                      patches=patches, diagnostics=diags, failure=failure)


@dataclass(frozen=True)
class TransportReport:
    errors: np.ndarray        # ||U P0 U* - P(s)|| per grid point
    conserved: np.ndarray     # ||U* P(s) U - P0|| per grid point
    max_error: float
    mean_error: float
    max_unitarity_defect: float
    rank_constant: bool


def verify_automorphic_equivalence(result: FlowResult) -> TransportReport:
    """Per grid point error of P(s) = U(s) P(s0) U(s)* and of the conserved
    quantity U(s)* P(s) U(s) = P(s0); also checks rank constancy."""
    if not result.unitaries:
        raise InvalidInput("flow result is empty")
    p0 = result.patches[0].projector
    dim = p0.shape[0]
    errs = []
    cons = []
    defects = []
    ranks = []
    for u, patch in zip(result.unitaries, result.patches):
        p = patch.projector
        errs.append(op_norm(u @ p0 @ u.conj().T - p))
        cons.append(op_norm(u.conj().T @ p @ u - p0))
        defects.append(op_norm(u.conj().T @ u - np.eye(dim)))
        ranks.append(patch.rank)
    errs = np.array(errs)
    cons = np.array(cons)
    return TransportReport(
        errors=errs, conserved=cons,
        max_error=float(np.max(errs)), mean_error=float(np.mean(errs)),
        max_unitarity_defect=float(np.max(defects)),
        rank_constant=len(set(ranks)) == 1,
    )
