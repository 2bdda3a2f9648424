"""Operator paths H(s) = H0 + Phi(s) and derivative formulas.

The difference of matrix functions along a bounded self-adjoint perturbation
Phi = B - A is a double operator integral of the divided-difference kernel,

    f(B) - f(A) = DOI(phi_f; E_A, F_B)(Phi),

exact at finite dimension up to eigensolver error.  Differentiating along a
path with both measures taken at the same point gives the derivative of
s -> f(H(s)) as DOI(phi_f; E_s, E_s)(Phi'(s)); for f(x) = e^(itx) this
reduces to the propagator-sandwich integral

    d/ds e^(itH(s)) = integral over r in [0,1] of it e^(itrH) Phi' e^(it(1-r)H) dr.

Central finite differences of s -> f(H(s)) serve as the independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, InvalidInput
from .kernels import WienerFunction, divided_difference_kernel, wiener_deriv, wiener_eval
from .linalg import hermitian_eig, hermitian_part, matrix_function, op_norm
from .doi import doi_apply
from .pvm import pvm_from_hermitian
from .quadrature import gauss_legendre


@dataclass(frozen=True)
class OperatorPath:
    """H(s) = h0 + phi(s) with an exact derivative phi_prime, on a closed s-interval."""

    h0: np.ndarray
    phi: Callable
    phi_prime: Callable
    s_domain: tuple
    descriptor: str = "custom"

    def check_s(self, s: float, pad: float = 0.0) -> float:
        lo, hi = self.s_domain
        if not (lo - 1e-12 <= s - pad and s + pad <= hi + 1e-12):
            raise DomainError(
                f"s = {s} (pad {pad}) outside path domain [{lo}, {hi}]"
            )
        return float(s)

    def hamiltonian(self, s: float) -> np.ndarray:
        self.check_s(s)
        return hermitian_part(np.asarray(self.h0, complex) + np.asarray(self.phi(s), complex))

    def derivative(self, s: float) -> np.ndarray:
        self.check_s(s)
        return hermitian_part(np.asarray(self.phi_prime(s), complex))


def linear_path(h0, v, s_domain=(0.0, 1.0)) -> OperatorPath:
    """Phi(s) = s V."""
    h0 = hermitian_part(h0)
    v = hermitian_part(v)
    return OperatorPath(h0=h0, phi=lambda s: s * v, phi_prime=lambda s: v,
                        s_domain=tuple(s_domain), descriptor="linear")


def polynomial_path(h0, vs, s_domain=(0.0, 1.0)) -> OperatorPath:
    """Phi(s) = sum_k s^k V_k for k = 1..len(vs)."""
    h0 = hermitian_part(h0)
    vs = [hermitian_part(v) for v in vs]
    if not vs:
        raise InvalidInput("polynomial path needs at least one coefficient matrix")

    def phi(s):
        return sum(s ** (k + 1) * v for k, v in enumerate(vs))

    def phi_prime(s):
        return sum((k + 1) * s ** k * v for k, v in enumerate(vs))

    return OperatorPath(h0=h0, phi=phi, phi_prime=phi_prime,
                        s_domain=tuple(s_domain), descriptor="polynomial")


def trig_path(h0, v, omega: float = 1.0, s_domain=(0.0, 1.0)) -> OperatorPath:
    """Phi(s) = sin(omega s) V."""
    h0 = hermitian_part(h0)
    v = hermitian_part(v)
    return OperatorPath(h0=h0,
                        phi=lambda s: np.sin(omega * s) * v,
                        phi_prime=lambda s: omega * np.cos(omega * s) * v,
                        s_domain=tuple(s_domain), descriptor="trigonometric")


def _as_scalar_pair(f):
    """Scalar f and f' from a WienerFunction or a plain (f, fprime) pair."""
    if isinstance(f, WienerFunction):
        return (lambda x: wiener_eval(f, x)), (lambda x: wiener_deriv(f, x))
    fv, fd = f
    return fv, fd


class FDifference(NamedTuple):
    doi: np.ndarray       # DOI(phi_f; E_A, F_B)(Phi)
    direct: np.ndarray    # f(B) - f(A)
    residual: float       # operator-norm difference


def f_difference(a, phi, f, diag_tol: float = 1e-7) -> FDifference:
    """Evaluate f(B) - f(A) for B = A + Phi both directly and as the
    divided-difference DOI with the measure of A on the left and of B on
    the right; returns both values and the operator-norm residual."""
    a = hermitian_part(a)
    phi = hermitian_part(phi)
    b = a + phi
    eig_a = hermitian_eig(a)
    eig_b = hermitian_eig(b)
    fv, fd = _as_scalar_pair(f)
    kernel = divided_difference_kernel(f if isinstance(f, WienerFunction) else fv,
                                       None if isinstance(f, WienerFunction) else fd,
                                       diag_tol=diag_tol)
    e = pvm_from_hermitian(a)
    ff = pvm_from_hermitian(b)
    doi_val = doi_apply(kernel, e, ff, phi)
    direct = matrix_function(eig_b, fv) - matrix_function(eig_a, fv)
    return FDifference(doi=doi_val, direct=direct, residual=op_norm(direct - doi_val))


class ExpDifferenceBound(NamedTuple):
    lhs_norm: float
    bound: float
    ok: bool


def exp_difference_bound(a, phi, t: float, slack: float = 1e-10) -> ExpDifferenceBound:
    """Check ||e^(itB) - e^(itA)|| <= |t| ||Phi|| for B = A + Phi."""
    a = hermitian_part(a)
    phi = hermitian_part(phi)
    eig_a = hermitian_eig(a)
    eig_b = hermitian_eig(a + phi)
    lhs = op_norm(matrix_function(eig_b, lambda x: np.exp(1j * t * x))
                  - matrix_function(eig_a, lambda x: np.exp(1j * t * x)))
    bound = abs(t) * op_norm(phi)
    return ExpDifferenceBound(lhs_norm=lhs, bound=bound, ok=lhs <= bound + slack)


def dk_derivative(path: OperatorPath, s: float, f, diag_tol: float = 1e-7) -> np.ndarray:
    """Derivative of s -> f(H(s)) as the divided-difference DOI with the
    spectral measure of H(s) on both sides, applied to Phi'(s)."""
    path.check_s(s)
    h = path.hamiltonian(s)
    dphi = path.derivative(s)
    fv, fd = _as_scalar_pair(f)
    kernel = divided_difference_kernel(f if isinstance(f, WienerFunction) else fv,
                                       None if isinstance(f, WienerFunction) else fd,
                                       diag_tol=diag_tol)
    e = pvm_from_hermitian(h)
    return doi_apply(kernel, e, e, dphi)


def default_fd_step(s: float) -> float:
    """Truncation-vs-rounding balance point for double precision."""
    return 1e-4 * (1.0 + abs(s))


def fd_derivative(path: OperatorPath, s: float, f, h: float | None = None) -> np.ndarray:
    """Central-difference oracle [f(H(s+h)) - f(H(s-h))] / (2h), O(h^2).

    The default step is 1e-4 * (1 + |s|).
    """
    if h is None:
        h = default_fd_step(s)
    if h <= 0:
        raise InvalidInput("step h must be positive")
    path.check_s(s, pad=h)
    fv, _ = _as_scalar_pair(f)
    plus = matrix_function(hermitian_eig(path.hamiltonian(s + h)), fv)
    minus = matrix_function(hermitian_eig(path.hamiltonian(s - h)), fv)
    return (plus - minus) / (2.0 * h)


def duhamel_derivative(path: OperatorPath, s: float, t: float, u_nodes: int = 64) -> np.ndarray:
    """d/ds e^(itH(s)) by Gauss-Legendre over the propagator sandwich:

        integral over r in [0, 1] of  it e^(itrH) Phi'(s) e^(it(1-r)H) dr

    Accurate to ~1e-10 with the default 64 nodes while |t| * spectral
    diameter <= 50; raise u_nodes beyond that.
    """
    path.check_s(s)
    if u_nodes < 2:
        raise InvalidInput("u_nodes must be >= 2")
    h = path.hamiltonian(s)
    dphi = path.derivative(s)
    eig = hermitian_eig(h)
    w = eig.vectors.conj().T @ dphi @ eig.vectors
    lam = eig.eigenvalues
    rs, ws = gauss_legendre(0.0, 1.0, u_nodes)
    acc = np.zeros_like(w)
    for r, wq in zip(rs, ws):
        left = np.exp(1j * t * r * lam)
        right = np.exp(1j * t * (1.0 - r) * lam)
        acc += wq * (left[:, None] * w * right[None, :])
    acc *= 1j * t
    return eig.vectors @ acc @ eig.vectors.conj().T


def min_eigenvalue_gap(h) -> float:
    """Smallest gap between consecutive eigenvalues (0 for dim 1)."""
    vals = hermitian_eig(h).eigenvalues
    if len(vals) < 2:
        return np.inf
    return float(np.min(np.diff(vals)))
