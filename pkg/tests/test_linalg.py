"""Matrix core: eigendecomposition, matrix functions, norms, polarization."""

import numpy as np
import pytest

from doiflow.errors import ConvergenceFailure, DomainError, InvalidInput, ShapeError
from doiflow.linalg import (commutator, hermitian_eig, hermitian_part, matrix_exp_i,
                            matrix_function, norms, op_norm,
                            quadratic_form_residual,
                            recover_operator_from_quadratic_form)
from doiflow.rng import CounterRng

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def test_eig_pauli_x():
    eig = hermitian_eig(X)
    assert np.allclose(eig.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_eig_one_by_one():
    eig = hermitian_eig(np.array([[3.0]]))
    assert np.allclose(eig.eigenvalues, [3.0])
    assert np.allclose(np.abs(eig.vectors), [[1.0]])


def test_eig_complex_example():
    # roots of (1 - x)^2 - 1 = 0, i.e. 0 and 2
    h = np.array([[1.0, 1.0j], [-1.0j, 1.0]])
    eig = hermitian_eig(h)
    assert np.allclose(eig.eigenvalues, [0.0, 2.0], atol=1e-12)


def test_eig_rejects_bad_input():
    with pytest.raises(InvalidInput):
        hermitian_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInput):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(ShapeError):
        hermitian_eig(np.zeros((2, 3)))


def test_eig_round_trip_many():
    rng = CounterRng(17)
    for trial in range(500):
        dim = 2 + int(rng.integers(0, 31, 1)[0])
        h = rng.hermitian(dim)
        eig = hermitian_eig(h)
        assert np.all(np.diff(eig.eigenvalues) >= 0)
        scale = 1.0 + op_norm(h)
        assert op_norm(eig.reconstruct() - h) <= 1e-10 * scale
        assert np.max(np.abs(eig.vectors.conj().T @ eig.vectors - np.eye(dim))) <= 1e-10


def test_jacobi_matches_lapack():
    rng = CounterRng(23)
    for dim in (2, 3, 5, 9, 16, 24):
        h = rng.hermitian(dim)
        a = hermitian_eig(h, method="lapack")
        b = hermitian_eig(h, method="jacobi")
        assert np.max(np.abs(a.eigenvalues - b.eigenvalues)) <= 1e-12 * (1 + op_norm(h))
        assert op_norm(b.reconstruct() - h) <= 1e-11 * (1 + op_norm(h))


def test_jacobi_degenerate():
    eig = hermitian_eig(np.diag([1.0, 1.0, 2.0]), method="jacobi")
    assert np.allclose(eig.eigenvalues, [1.0, 1.0, 2.0])


def test_jacobi_reports_residual_on_failure():
    err = ConvergenceFailure("x", residual=3.0)
    assert err.residual == 3.0


def test_matrix_function_diag_exp():
    eig = hermitian_eig(np.diag([0.0, 1.0]))
    out = matrix_function(eig, np.exp)
    assert np.allclose(out, np.diag([1.0, np.e]), atol=1e-14)


def test_matrix_function_identity_reconstructs():
    rng = CounterRng(29)
    h = rng.hermitian(7)
    out = matrix_function(hermitian_eig(h), lambda x: x)
    assert op_norm(out - h) <= 1e-10 * (1 + op_norm(h))


def test_matrix_function_square_of_pauli_x():
    out = matrix_function(hermitian_eig(X), lambda x: x ** 2)
    assert np.allclose(out, np.eye(2), atol=1e-14)


def test_matrix_function_domain_error_names_eigenvalue():
    eig = hermitian_eig(np.diag([0.0, 1.0]))
    with np.errstate(divide="ignore"), pytest.raises(DomainError) as exc:
        matrix_function(eig, lambda x: 1.0 / x)
    assert "0" in str(exc.value)


def test_exp_i_pauli_pi():
    assert np.allclose(matrix_exp_i(X, np.pi), -np.eye(2), atol=1e-13)


def test_exp_i_zero_t():
    rng = CounterRng(31)
    h = rng.hermitian(5)
    assert np.allclose(matrix_exp_i(h, 0.0), np.eye(5), atol=1e-14)


def test_exp_i_diagonal():
    out = matrix_exp_i(np.diag([2.0, -3.0]), 0.7)
    assert np.allclose(out, np.diag([np.exp(1j * 1.4), np.exp(-1j * 2.1)]), atol=1e-14)


def test_exp_i_unitary():
    rng = CounterRng(37)
    for trial in range(20):
        dim = 2 + int(rng.integers(0, 11, 1)[0])
        v = matrix_exp_i(rng.hermitian(dim), float(rng.normal(1)[0]))
        assert op_norm(v.conj().T @ v - np.eye(dim)) <= 1e-10


def test_norms_examples():
    n = norms(np.diag([3.0, -4.0]))
    assert np.allclose([n.op_norm, n.hs_norm, n.trace_norm], [4.0, 5.0, 7.0], atol=1e-12)
    z = norms(np.zeros((3, 3)))
    assert z.op_norm == z.hs_norm == z.trace_norm == 0.0
    rng = CounterRng(41)
    v = rng.unit_vector(6)
    w = rng.unit_vector(6)
    r = norms(np.outer(v, w.conj()))
    assert np.allclose([r.op_norm, r.hs_norm, r.trace_norm], [1.0, 1.0, 1.0], atol=1e-12)


def test_norm_ordering():
    rng = CounterRng(43)
    for trial in range(50):
        m = rng.complex_matrix(2 + trial % 9, 2 + (trial * 7) % 9)
        n = norms(m)
        assert n.op_norm <= n.hs_norm + 1e-12
        assert n.hs_norm <= n.trace_norm + 1e-12


def test_commutator_examples():
    rng = CounterRng(47)
    a = rng.complex_matrix(4, 4)
    assert np.allclose(commutator(a, a), 0.0)
    assert np.allclose(commutator(a, np.eye(4)), 0.0)
    assert np.allclose(commutator(X, Z), -2j * Y, atol=1e-14)
    with pytest.raises(ShapeError):
        commutator(np.eye(2), np.eye(3))


def test_polarization_identity_form():
    rec = recover_operator_from_quadratic_form(lambda u: float(np.vdot(u, u).real), 4)
    assert np.allclose(rec, np.eye(4), atol=1e-13)


def test_polarization_zero_form():
    rec = recover_operator_from_quadratic_form(lambda u: 0.0, 3)
    assert np.allclose(rec, 0.0)


def test_polarization_recovers_random_hermitian():
    rng = CounterRng(53)
    m = rng.hermitian(8)
    rec = recover_operator_from_quadratic_form(lambda u: complex(u.conj() @ (m @ u)), 8)
    assert op_norm(rec - m) <= 1e-12 * (1 + op_norm(m))


def test_polarization_recovers_non_hermitian_generator():
    # a complex-valued quadratic form determines a general operator
    rng = CounterRng(59)
    m = rng.complex_matrix(5, 5)
    rec = recover_operator_from_quadratic_form(lambda u: complex(u.conj() @ (m @ u)), 5)
    assert op_norm(rec - m) <= 1e-11 * (1 + op_norm(m))


def test_polarization_consistency_probes():
    rng = CounterRng(61)
    m = rng.hermitian(6)
    rho = lambda u: complex(u.conj() @ (m @ u))
    rec = recover_operator_from_quadratic_form(rho, 6)
    probes = [rng.vector(6) for _ in range(100)]
    assert quadratic_form_residual(rho, rec, probes) <= 1e-10 * (1 + op_norm(m)) * 30


def test_polarization_rejects_non_finite():
    with pytest.raises(InvalidInput):
        recover_operator_from_quadratic_form(lambda u: np.nan, 2)


def test_hermitian_part_is_projection():
    rng = CounterRng(67)
    m = rng.complex_matrix(5, 5)
    h = hermitian_part(m)
    assert np.allclose(h, h.conj().T)
    assert np.allclose(hermitian_part(h), h)
