"""Dense complex matrix arithmetic on finite-dimensional Hilbert spaces.

Provides the Hermitian eigendecomposition, spectral matrix functions
f(H) = U diag(f(lambda)) U*, the three matrix norms (operator,
Hilbert-Schmidt, trace), commutators, and the recovery of an operator from
its quadratic form u -> rho(u) by polarization:

    sigma(u, v) = (1/4) [rho(u+v) - rho(u-v) - i rho(u+iv) + i rho(u-iv)]

with the convention sigma(u, v) = <u, A v>, conjugate-linear in the first
argument.

The default eigensolver is LAPACK's Hermitian solver (deterministic for
identical input bytes).  A self-contained cyclic Jacobi solver is provided
as an independent cross-check path; it converges when the off-diagonal
Frobenius mass falls below 1e-13 * ||H||_F, with a hard cap of 100 sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, DomainError, InvalidInput, ShapeError

ABS_FLOOR = 1e-14  # absolute floor under all relative tolerances


def as_complex_matrix(m) -> np.ndarray:
    """Validate and return a dense complex matrix (finite entries, 2-D)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvalidInput("matrix contains non-finite entries")
    return arr


def hermitian_part(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def hermiticity_defect(m) -> float:
    """Max-norm of M - M*."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, rtol: float = 1e-12):
    """Symmetrize M to (M + M*)/2, recording the pre-symmetrization defect.

    Raises InvalidInput if the defect exceeds rtol * (1 + max|M|).
    Returns (hermitian_matrix, defect).
    """
    arr = as_complex_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"Hermitian matrix must be square, got {arr.shape}")
    defect = hermiticity_defect(arr)
    scale = 1.0 + (float(np.max(np.abs(arr))) if arr.size else 0.0)
    if defect > max(rtol * scale, ABS_FLOOR):
        raise InvalidInput(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds {rtol:.1e} * (1 + max|M|)"
        )
    return hermitian_part(arr), defect


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix: H = U diag(eigenvalues) U*.

    eigenvalues are real and ascending; columns of ``vectors`` are the
    corresponding orthonormal eigenvectors.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T


def hermitian_eig(h, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    method "lapack" uses numpy's Hermitian solver; "jacobi" runs the
    self-contained cyclic Jacobi sweep solver (slower, used as an
    independent check).
    """
    hm, _ = check_hermitian(h)
    if hm.shape[0] == 0:
        raise InvalidInput("empty matrix has no eigendecomposition")
    if method == "lapack":
        vals, vecs = np.linalg.eigh(hm)
    elif method == "jacobi":
        vals, vecs = _jacobi_eigh(hm)
    else:
        raise InvalidInput(f"unknown eigensolver method {method!r}")
    return EigenDecomposition(eigenvalues=np.asarray(vals, float), vectors=vecs)


def _jacobi_eigh(h: np.ndarray, max_sweeps: int = 100):
    """Cyclic complex Jacobi rotations; stops when off-diagonal Frobenius
    mass <= 1e-13 * ||H||_F."""
    a = h.astype(complex).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm_f = np.linalg.norm(h)
    if norm_f == 0.0:
        return np.zeros(n), v
    target = 1e-13 * norm_f

    def offdiag(mat):
        return float(np.linalg.norm(mat - np.diag(np.diag(mat))))

    for _ in range(max_sweeps):
        if offdiag(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # phase to make the pivot real, then a real 2x2 rotation;
                # the branch with |theta| <= pi/4 keeps the sweep convergent
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                ang = np.arctan2(2.0 * abs(apq), app - aqq)
                if ang > 0.5 * np.pi:
                    ang -= np.pi
                theta = 0.5 * ang
                c = np.cos(theta)
                s = np.sin(theta) * phase
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + np.conj(s) * col_q
                a[:, q] = -s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + s * row_q
                a[q, :] = -np.conj(s) * row_p + c * row_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + np.conj(s) * vq
                v[:, q] = -s * vp + c * vq
    else:
        res = offdiag(a)
        if res > target:
            raise ConvergenceFailure(
                f"Jacobi sweeps exhausted: off-diagonal residual {res:.3e} "
                f"(target {target:.3e})",
                residual=float(res),
            )
    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def matrix_function(eig: EigenDecomposition, f: Callable) -> np.ndarray:
    """U diag(f(lambda)) U* for a scalar function f defined on the spectrum."""
    fvals = np.asarray([complex(f(x)) for x in eig.eigenvalues])
    bad = ~np.isfinite(fvals)
    if np.any(bad):
        x = eig.eigenvalues[bad][0]
        raise DomainError(f"function not finite at eigenvalue {x!r}")
    return (eig.vectors * fvals) @ eig.vectors.conj().T


def matrix_exp_i(h, t: float) -> np.ndarray:
    """exp(i t H) for Hermitian H; unitary up to eigensolver error."""
    eig = h if isinstance(h, EigenDecomposition) else hermitian_eig(h)
    phases = np.exp(1j * t * eig.eigenvalues)
    return (eig.vectors * phases) @ eig.vectors.conj().T


@dataclass(frozen=True)
class MatrixNorms:
    op_norm: float
    hs_norm: float
    trace_norm: float


def singular_values(m) -> np.ndarray:
    """Singular values (descending) via the eigendecomposition of M* M."""
    arr = as_complex_matrix(m)
    gram = arr.conj().T @ arr
    vals = np.linalg.eigvalsh(hermitian_part(gram))
    return np.sqrt(np.clip(vals, 0.0, None))[::-1]


def norms(m) -> MatrixNorms:
    """Operator, Hilbert-Schmidt, and trace norms (op <= hs <= trace)."""
    sv = singular_values(m)
    if sv.size == 0:
        return MatrixNorms(0.0, 0.0, 0.0)
    return MatrixNorms(
        op_norm=float(sv[0]),
        hs_norm=float(np.sqrt(np.sum(sv ** 2))),
        trace_norm=float(np.sum(sv)),
    )


def op_norm(m) -> float:
    return norms(m).op_norm


def hs_norm(m) -> float:
    arr = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(arr))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product <A, B> = Tr(A* B), conjugate-linear in A."""
    return complex(np.trace(np.asarray(a).conj().T @ np.asarray(b)))


def commutator(a, b) -> np.ndarray:
    """[A, B] = AB - BA."""
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    if am.shape[0] != am.shape[1] or am.shape != bm.shape:
        raise ShapeError(f"commutator needs equal square shapes, got {am.shape} and {bm.shape}")
    return am @ bm - bm @ am


def recover_operator_from_quadratic_form(rho: Callable, dim: int) -> np.ndarray:
    """Recover A with rho(u) = <u, A u> from the quadratic form rho by polarization.

    A[j, k] = sigma(e_j, e_k) on the standard basis.  If rho is real-valued
    on a small test battery, the result is symmetrized to its Hermitian part.
    """
    if dim < 1:
        raise InvalidInput("dim must be >= 1")

    def rho_checked(u):
        val = complex(rho(u))
        if not (np.isfinite(val.real) and np.isfinite(val.imag)):
            raise InvalidInput("quadratic form returned a non-finite value")
        return val

    basis = np.eye(dim, dtype=complex)
    a = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        for k in range(dim):
            ej, ek = basis[j], basis[k]
            a[j, k] = 0.25 * (
                rho_checked(ej + ek)
                - rho_checked(ej - ek)
                - 1j * rho_checked(ej + 1j * ek)
                + 1j * rho_checked(ej - 1j * ek)
            )

    battery = list(basis)
    if dim >= 2:
        battery.append((basis[0] + basis[1]) / np.sqrt(2))
        battery.append((basis[0] + 1j * basis[-1]) / np.sqrt(2))
    real_valued = all(abs(rho_checked(u).imag) <= 1e-10 * (1 + abs(rho_checked(u))) for u in battery)
    if real_valued:
        a = hermitian_part(a)
    return a


def quadratic_form_residual(rho: Callable, a: np.ndarray, probes) -> float:
    """max |<u, A u> - rho(u)| over the probe vectors (recovery diagnostics)."""
    worst = 0.0
    for u in probes:
        u = np.asarray(u, dtype=complex)
        worst = max(worst, abs(complex(u.conj() @ (a @ u)) - complex(rho(u))))
    return worst
