"""Finite atomic projection-valued measures and their product on matrix space.

A FinitePVM is a list of orthogonal projectors P_i at strictly increasing
real locations x_i with sum(P_i) = 1.  The product of two such measures acts
on n x m matrices by T -> P_i T Q_j per grid atom (i, j); scalar measures
are obtained by pairing with vectors, <v, P_i w>, or with Hilbert-Schmidt
test matrices, Tr(S* P_i T Q_j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, InvalidInput, ShapeError
from .linalg import EigenDecomposition, hermitian_eig, hermitian_part

DEFAULT_CLUSTER_REL = 1e-9


@dataclass(frozen=True)
class AtomicMeasure:
    """Complex measure with finitely many atoms at strictly increasing locations."""

    locations: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> complex:
        return complex(np.sum(self.weights))

    def integrate(self, f: Callable) -> complex:
        return complex(sum(w * complex(f(x)) for x, w in zip(self.locations, self.weights)))


@dataclass(frozen=True)
class GridMeasure:
    """Complex measure on the product grid of two atom lists; weights[i, j]."""

    x_locations: np.ndarray
    y_locations: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> complex:
        return complex(np.sum(self.weights))


@dataclass(frozen=True)
class FinitePVM:
    """Atomic projection-valued measure on the real line."""

    locations: np.ndarray
    projectors: tuple
    dim: int = field(default=0)

    def __post_init__(self):
        locs = np.asarray(self.locations, dtype=float)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "projectors", tuple(np.asarray(p, dtype=complex) for p in self.projectors))
        if len(self.projectors) != len(locs):
            raise InvalidInput("locations and projectors must have equal length")
        if len(locs) == 0:
            raise InvalidInput("a FinitePVM needs at least one atom")
        if np.any(np.diff(locs) <= 0):
            raise InvalidInput("atom locations must be strictly increasing")
        dim = self.projectors[0].shape[0]
        for p in self.projectors:
            if p.shape != (dim, dim):
                raise ShapeError("all projectors must be square with equal dimension")
        object.__setattr__(self, "dim", dim)

    @property
    def n_atoms(self) -> int:
        return len(self.locations)

    @cached_property
    def ranks(self) -> np.ndarray:
        return np.array([int(round(np.trace(p).real)) for p in self.projectors])

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal basis adapted to the atoms; columns grouped by atom."""
        cols = []
        for p in self.projectors:
            vals, vecs = np.linalg.eigh(hermitian_part(p))
            cols.append(vecs[:, vals > 0.5])
        return np.hstack(cols)

    @cached_property
    def column_atoms(self) -> np.ndarray:
        """Atom index of each basis column."""
        return np.repeat(np.arange(self.n_atoms), self.ranks)

    def validate(self, tol: float = 1e-10) -> None:
        """Check idempotence, self-adjointness, pairwise orthogonality, completeness."""
        n = self.dim
        total = np.zeros((n, n), dtype=complex)
        for i, p in enumerate(self.projectors):
            if np.max(np.abs(p - p.conj().T)) > tol:
                raise InvalidInput(f"projector {i} is not self-adjoint within {tol}")
            if np.max(np.abs(p @ p - p)) > tol:
                raise InvalidInput(f"projector {i} is not idempotent within {tol}")
            total += p
        for i in range(self.n_atoms):
            for j in range(i + 1, self.n_atoms):
                if np.max(np.abs(self.projectors[i] @ self.projectors[j])) > tol:
                    raise InvalidInput(f"projectors {i} and {j} are not orthogonal within {tol}")
        if np.max(np.abs(total - np.eye(n))) > tol:
            raise InvalidInput(f"projectors do not sum to the identity within {tol}")

    def projector_for(self, indices: Iterable[int]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in indices:
            out += self.projectors[i]
        return out


def cluster_eigenvalues(vals: np.ndarray, cluster_tol: float | None = None) -> list:
    """Group ascending eigenvalues into clusters chained by gaps <= cluster_tol.

    Default tolerance: 1e-9 * max(1, spectral diameter).
    """
    vals = np.asarray(vals, dtype=float)
    if cluster_tol is None:
        diam = float(vals[-1] - vals[0]) if len(vals) > 1 else 0.0
        cluster_tol = DEFAULT_CLUSTER_REL * max(1.0, diam)
    if cluster_tol < 0:
        raise InvalidInput("cluster_tol must be nonnegative")
    groups: list[list[int]] = [[0]]
    for k in range(1, len(vals)):
        if vals[k] - vals[k - 1] <= cluster_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def pvm_from_eig(eig: EigenDecomposition, cluster_tol: float | None = None) -> FinitePVM:
    """Build the spectral measure from an eigendecomposition, merging eigenvalues
    closer than cluster_tol (chained transitively) into single atoms.

    The location of a merged atom is the rank-weighted mean of its eigenvalues.
    """
    vals = eig.eigenvalues
    groups = cluster_eigenvalues(vals, cluster_tol)

    locations = []
    projectors = []
    for g in groups:
        vecs = eig.vectors[:, g]
        projectors.append(vecs @ vecs.conj().T)
        locations.append(float(np.mean(vals[g])))
    out = FinitePVM(locations=np.array(locations), projectors=tuple(projectors))
    # the eigenvector columns (grouped in ascending order) already form the
    # adapted basis; seed the caches rather than re-diagonalizing projectors
    out.__dict__["ranks"] = np.array([len(g) for g in groups])
    out.__dict__["basis"] = eig.vectors.copy()
    out.__dict__["column_atoms"] = np.repeat(np.arange(len(groups)),
                                             [len(g) for g in groups])
    return out


def pvm_from_hermitian(h, cluster_tol: float | None = None) -> FinitePVM:
    return pvm_from_eig(hermitian_eig(h), cluster_tol)


def integrate_scalar(pvm: FinitePVM, alpha: Callable) -> np.ndarray:
    """sum_i alpha(x_i) P_i, the spectral integral of a scalar function."""
    out = np.zeros((pvm.dim, pvm.dim), dtype=complex)
    for x, p in zip(pvm.locations, pvm.projectors):
        a = complex(alpha(x))
        if not (np.isfinite(a.real) and np.isfinite(a.imag)):
            raise DomainError(f"integrand not finite at atom location {x!r}")
        out += a * p
    return out


def scalar_measure(pvm: FinitePVM, v, w) -> AtomicMeasure:
    """The complex measure <v, E(.) w> with atoms (x_i, <v, P_i w>)."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape != (pvm.dim,) or w.shape != (pvm.dim,):
        raise ShapeError(f"vectors must have dim {pvm.dim}")
    weights = np.array([complex(v.conj() @ (p @ w)) for p in pvm.projectors])
    return AtomicMeasure(locations=pvm.locations.copy(), weights=weights)


@dataclass(frozen=True)
class ProductPVM:
    """Product measure of two atomic PVMs acting on dim(left) x dim(right) matrices."""

    left: FinitePVM
    right: FinitePVM

    @property
    def grid_shape(self):
        return (self.left.n_atoms, self.right.n_atoms)

    def _check_matrix(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        if t.shape != (self.left.dim, self.right.dim):
            raise ShapeError(
                f"matrix must be {self.left.dim} x {self.right.dim}, got {t.shape}"
            )
        return t


def product_apply(g: ProductPVM, region: Iterable[tuple], t) -> np.ndarray:
    """Apply the product measure of a region: sum over (i, j) of P_i T Q_j."""
    t = g._check_matrix(t)
    n_left, n_right = g.grid_shape
    out = np.zeros_like(t)
    for i, j in region:
        i = int(i)
        j = int(j)
        if not (0 <= i < n_left) or not (0 <= j < n_right):
            raise IndexError(f"atom pair ({i}, {j}) outside grid {g.grid_shape}")
        out += g.left.projectors[i] @ t @ g.right.projectors[j]
    return out


def product_scalar_measure(g: ProductPVM, s, t) -> GridMeasure:
    """The complex measure Tr(S* G(.) T) on the atom grid: weight (i, j) = Tr(S* P_i T Q_j)."""
    s = g._check_matrix(s)
    t = g._check_matrix(t)
    n_left, n_right = g.grid_shape
    weights = np.empty((n_left, n_right), dtype=complex)
    for i, p in enumerate(g.left.projectors):
        a = s.conj().T @ (p @ t)  # S* P_i T; weight = Tr(A Q_j)
        for j, q in enumerate(g.right.projectors):
            weights[i, j] = np.sum(a * q.T)
    return GridMeasure(
        x_locations=g.left.locations.copy(),
        y_locations=g.right.locations.copy(),
        weights=weights,
    )
