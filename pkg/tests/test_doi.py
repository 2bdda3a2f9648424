"""The double operator integral: Schur path, decomposition oracle, norms,
trace pairings, adjoints, and the algebra homomorphism."""

import numpy as np
import pytest

from doiflow.doi import (doi_adjoint_check, doi_apply, doi_apply_decomposed,
                         doi_s2_norm, schur_matrix, swapped_conjugate_kernel,
                         trace_pairing)
from doiflow.errors import DomainError, ShapeError
from doiflow.kernels import (Kernel, decomposed_one, decomposed_zero,
                             divided_difference_kernel, exp_kernel,
                             kernel_const_one, multiplier_bound)
from doiflow.linalg import hs_norm, norms, op_norm
from doiflow.pvm import ProductPVM, integrate_scalar, product_apply, pvm_from_hermitian
from doiflow.rng import CounterRng

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _atoms(vals):
    return pvm_from_hermitian(np.diag(np.asarray(vals, dtype=float)))


def test_schur_matrix_const_one():
    e = _atoms([0.0, 1.0])
    k = schur_matrix(kernel_const_one(), e, e)
    assert np.allclose(k, np.ones((2, 2)))


def test_schur_matrix_x_minus_y():
    e = _atoms([0.0, 1.0])
    diff = Kernel(lambda x, y: np.asarray(x) - np.asarray(y) + 0j, vectorized=True)
    assert np.allclose(schur_matrix(diff, e, e), [[0.0, -1.0], [1.0, 0.0]])


def test_schur_matrix_exp_divided_difference():
    e = _atoms([0.0, 1.0])
    k = schur_matrix(divided_difference_kernel(np.exp, np.exp), e, e)
    expected = np.array([[1.0, np.e - 1.0], [np.e - 1.0, np.e]])
    assert np.allclose(k, expected, atol=1e-12)


def test_schur_matrix_domain_error_names_pair():
    e = _atoms([0.0, 1.0])
    bad = Kernel(lambda x, y: np.where(np.asarray(y) > 0.5, np.inf, 1.0 + 0j),
                 vectorized=True)
    with pytest.raises(DomainError) as exc:
        schur_matrix(bad, e, e)
    assert "(0, 1)" in str(exc.value)


def test_doi_unit_kernel_is_identity():
    rng = CounterRng(211)
    e = pvm_from_hermitian(rng.hermitian(5))
    f = pvm_from_hermitian(rng.hermitian(4))
    t = rng.complex_matrix(5, 4)
    assert op_norm(doi_apply(kernel_const_one(), e, f, t) - t) <= 1e-12 * (1 + op_norm(t))


def test_doi_separated_kernel_factorizes():
    rng = CounterRng(223)
    e = pvm_from_hermitian(rng.hermitian(5))
    f = pvm_from_hermitian(rng.hermitian(4))
    t = rng.complex_matrix(5, 4)
    alpha = lambda x: np.exp(0.4 * np.asarray(x))
    beta = lambda y: 1.0 + 1j * np.asarray(y)
    k = Kernel(lambda x, y: alpha(x) * beta(y), vectorized=True)
    lhs = doi_apply(k, e, f, t)
    rhs = integrate_scalar(e, alpha) @ t @ integrate_scalar(f, beta)
    assert op_norm(lhs - rhs) <= 1e-10 * (1 + op_norm(rhs))


def test_doi_pauli_xy_example():
    e = pvm_from_hermitian(X)
    t = np.diag([1.0, 0.0]).astype(complex)
    k = Kernel(lambda x, y: np.asarray(x) * np.asarray(y) + 0j, vectorized=True)
    out = doi_apply(k, e, e, t)
    assert np.allclose(out, X @ t @ X, atol=1e-12)
    assert np.allclose(out, np.diag([0.0, 1.0]), atol=1e-12)


def test_doi_agrees_with_product_measure_weighting():
    rng = CounterRng(227)
    e = pvm_from_hermitian(rng.hermitian(4))
    f = pvm_from_hermitian(rng.hermitian(3))
    g = ProductPVM(e, f)
    t = rng.complex_matrix(4, 3)
    k = exp_kernel(1.2).as_kernel()
    grid = schur_matrix(k, e, f)
    expected = np.zeros_like(t)
    for i in range(e.n_atoms):
        for j in range(f.n_atoms):
            expected += grid[i, j] * product_apply(g, [(i, j)], t)
    assert op_norm(doi_apply(k, e, f, t) - expected) <= 1e-10 * (1 + op_norm(expected))


def test_doi_shape_error():
    rng = CounterRng(229)
    e = pvm_from_hermitian(rng.hermitian(3))
    with pytest.raises(ShapeError):
        doi_apply(kernel_const_one(), e, e, rng.complex_matrix(3, 4))


def test_doi_clustered_atoms_scale_blocks():
    # rank-2 atom: the multiplier scales the whole block by one value
    h = np.diag([0.0, 1e-12, 3.0])
    e = pvm_from_hermitian(h, cluster_tol=1e-9)
    assert e.n_atoms == 2
    t = np.eye(3, dtype=complex)
    k = Kernel(lambda x, y: np.asarray(x) + np.asarray(y) + 0j, vectorized=True)
    out = doi_apply(k, e, e, t)
    x0, x1 = e.locations
    expected = np.diag([2 * x0, 2 * x0, 2 * x1])
    assert np.allclose(out, expected, atol=1e-10)


def test_decomposed_oracle_matches_schur_path():
    rng = CounterRng(233)
    for trial in range(5):
        dim = 2 + int(rng.integers(0, 7, 1)[0])
        e = pvm_from_hermitian(rng.hermitian(dim))
        f = pvm_from_hermitian(rng.hermitian(dim))
        t = rng.complex_matrix(dim, dim)
        k = exp_kernel(1.0 + trial * 0.3)
        a = doi_apply(k, e, f, t)
        b = doi_apply_decomposed(k, e, f, t)
        scale = 1e-9 * (1 + hs_norm(t)) * max(1.0, multiplier_bound(k, e, f))
        assert op_norm(a - b) <= scale


def test_decomposed_single_term_is_separated():
    rng = CounterRng(239)
    e = pvm_from_hermitian(rng.hermitian(4))
    f = pvm_from_hermitian(rng.hermitian(4))
    t = rng.complex_matrix(4, 4)
    one = decomposed_one()
    assert op_norm(doi_apply_decomposed(one, e, f, t) - t) <= 1e-12 * (1 + op_norm(t))


def test_decomposed_empty_is_zero():
    rng = CounterRng(241)
    e = pvm_from_hermitian(rng.hermitian(3))
    t = rng.complex_matrix(3, 3)
    assert np.allclose(doi_apply_decomposed(decomposed_zero(), e, e, t), 0.0)


def test_s2_norm_examples():
    e = _atoms([0.0, 1.0])
    c = Kernel(lambda x, y: np.broadcast_arrays(
        np.asarray(x) * 0 + (2.0 - 1.0j), y)[0], vectorized=True)
    assert abs(doi_s2_norm(c, e, e) - abs(2.0 - 1.0j)) <= 1e-12
    diff = Kernel(lambda x, y: np.asarray(x) - np.asarray(y) + 0j, vectorized=True)
    assert abs(doi_s2_norm(diff, e, e) - 1.0) <= 1e-12
    e3 = _atoms([0.0, 1.0, 2.0])
    dd = divided_difference_kernel(np.exp, np.exp)
    # brute force over the atom grid, diagonal values f'(x) included: the
    # largest entry is f'(2) = e^2, ahead of the off-diagonal e^2 - e
    brute = max(abs(dd(x, y)) for x in e3.locations for y in e3.locations)
    assert abs(brute - np.e ** 2) <= 1e-12
    assert abs(doi_s2_norm(dd, e3, e3) - brute) <= 1e-10


def test_s2_norm_is_hs_operator_norm_by_power_iteration():
    rng = CounterRng(251)
    e = _atoms([0.0, 1.0, 2.0])
    k = divided_difference_kernel(np.exp, np.exp)
    k_swap = swapped_conjugate_kernel(k)
    t = rng.complex_matrix(3, 3)
    for _ in range(60):
        t = doi_apply(k_swap, e, e, doi_apply(k, e, e, t).conj().T).conj().T
        t = t / hs_norm(t)
    est = hs_norm(doi_apply(k, e, e, t))
    assert abs(est - doi_s2_norm(k, e, e)) <= 1e-8 * (1 + est)


def test_s2_contraction_lipschitz():
    rng = CounterRng(257)
    e = pvm_from_hermitian(rng.hermitian(6))
    f = pvm_from_hermitian(rng.hermitian(6))
    k = exp_kernel(1.4).as_kernel()
    bound = doi_s2_norm(k, e, f)
    for trial in range(10):
        t1 = rng.complex_matrix(6, 6)
        t2 = rng.complex_matrix(6, 6)
        lhs = hs_norm(doi_apply(k, e, f, t1) - doi_apply(k, e, f, t2))
        assert lhs <= bound * hs_norm(t1 - t2) + 1e-10


def test_trace_and_op_norm_bounds():
    rng = CounterRng(263)
    e = pvm_from_hermitian(rng.hermitian(6))
    f = pvm_from_hermitian(rng.hermitian(6))
    k = exp_kernel(1.9)
    bound = multiplier_bound(k, e, f)
    for trial in range(20):
        t = rng.complex_matrix(6, 6)
        out = doi_apply_decomposed(k, e, f, t)
        nt, no = norms(t), norms(out)
        assert no.trace_norm <= bound * nt.trace_norm * (1 + 1e-9)
        assert no.op_norm <= bound * nt.op_norm * (1 + 1e-9)


def test_trace_pairing_rank_one_is_matrix_element():
    rng = CounterRng(269)
    e = pvm_from_hermitian(rng.hermitian(4))
    f = pvm_from_hermitian(rng.hermitian(4))
    v, w = rng.vector(4), rng.vector(4)
    t = rng.complex_matrix(4, 4)
    k = exp_kernel(0.8)
    tp = trace_pairing(k, e, f, np.outer(v, w.conj()), t)
    direct = complex(v.conj() @ (doi_apply(k, e, f, t) @ w))
    assert abs(tp.value - direct) <= 1e-10 * (1 + abs(direct))
    assert tp.residual <= 1e-9 * (1 + hs_norm(t))


def test_trace_pairing_zero_t():
    rng = CounterRng(271)
    e = pvm_from_hermitian(rng.hermitian(3))
    tp = trace_pairing(exp_kernel(1.0), e, e, rng.complex_matrix(3, 3),
                       np.zeros((3, 3), dtype=complex))
    assert tp.value == 0.0 and tp.residual == 0.0


def test_trace_pairing_random_six_by_six():
    rng = CounterRng(277)
    e = pvm_from_hermitian(rng.hermitian(6))
    f = pvm_from_hermitian(rng.hermitian(6))
    s = rng.complex_matrix(6, 6)
    t = rng.complex_matrix(6, 6)
    k = exp_kernel(1.0)
    tp = trace_pairing(k, e, f, s, t)
    tol = 1e-9 * (1 + hs_norm(s) * hs_norm(t) * max(1.0, multiplier_bound(k, e, f)))
    assert tp.residual <= tol


def test_adjoint_identity():
    rng = CounterRng(281)
    e = pvm_from_hermitian(rng.hermitian(5))
    f = pvm_from_hermitian(rng.hermitian(5))
    t = rng.complex_matrix(5, 5)
    k = exp_kernel(1.3).as_kernel()
    assert doi_adjoint_check(k, e, f, t) <= 1e-10 * (1 + hs_norm(t)) * doi_s2_norm(k, e, f)


def test_adjoint_real_symmetric_kernel_hermitian_output():
    rng = CounterRng(283)
    h = rng.hermitian(4)
    e = pvm_from_hermitian(h)
    t = rng.hermitian(4)
    k = Kernel(lambda x, y: np.asarray(x) + np.asarray(y) + 0j, vectorized=True)
    out = doi_apply(k, e, e, t)
    assert op_norm(out - out.conj().T) <= 1e-10 * (1 + op_norm(out))


def test_adjoint_constant_i_kernel():
    rng = CounterRng(293)
    e = pvm_from_hermitian(rng.hermitian(3))
    t = rng.complex_matrix(3, 3)
    ki = Kernel(lambda x, y: np.broadcast_arrays(np.asarray(x) * 0 + 1j, y)[0],
                vectorized=True)
    out = doi_apply(ki, e, e, t)
    assert op_norm(out - 1j * t) <= 1e-12 * (1 + op_norm(t))
    assert doi_adjoint_check(ki, e, e, t) <= 1e-12 * (1 + op_norm(t))


def test_homomorphism_and_linearity():
    rng = CounterRng(307)
    e = pvm_from_hermitian(rng.hermitian(6))
    f = pvm_from_hermitian(rng.hermitian(6))
    t = rng.complex_matrix(6, 6)
    k1 = exp_kernel(0.9).as_kernel()
    k2 = divided_difference_kernel(np.exp, np.exp)
    prod = Kernel(lambda x, y: k1(x, y) * k2(x, y), vectorized=True)
    lhs = doi_apply(prod, e, f, t)
    rhs = doi_apply(k1, e, f, doi_apply(k2, e, f, t))
    assert op_norm(lhs - rhs) <= 1e-9 * (1 + op_norm(lhs))

    lam = 0.7 - 0.2j
    lin_k = Kernel(lambda x, y: k1(x, y) + lam * k2(x, y), vectorized=True)
    lhs2 = doi_apply(lin_k, e, f, t)
    rhs2 = doi_apply(k1, e, f, t) + lam * doi_apply(k2, e, f, t)
    assert op_norm(lhs2 - rhs2) <= 1e-10 * (1 + op_norm(lhs2))

    t2 = rng.complex_matrix(6, 6)
    lhs3 = doi_apply(k1, e, f, t + lam * t2)
    rhs3 = doi_apply(k1, e, f, t) + lam * doi_apply(k1, e, f, t2)
    assert op_norm(lhs3 - rhs3) <= 1e-10 * (1 + op_norm(lhs3))
