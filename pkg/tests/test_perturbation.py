"""Operator paths: function differences, derivative formulas, oracles."""

import numpy as np
import pytest

from doiflow.doi import doi_apply
from doiflow.errors import DomainError
from doiflow.kernels import divided_difference_kernel, wiener_cauchy, wiener_sin
from doiflow.linalg import hermitian_eig, matrix_function, op_norm
from doiflow.perturbation import (dk_derivative, duhamel_derivative,
                                  exp_difference_bound, f_difference, fd_derivative,
                                  linear_path, min_eigenvalue_gap, polynomial_path,
                                  trig_path)
from doiflow.pvm import pvm_from_hermitian
from doiflow.rng import CounterRng

EXP = (np.exp, np.exp)


def test_f_difference_zero_perturbation():
    rng = CounterRng(311)
    a = rng.hermitian(5)
    r = f_difference(a, np.zeros((5, 5)), EXP)
    assert op_norm(r.direct) <= 1e-12
    assert op_norm(r.doi) <= 1e-12


def test_f_difference_square_is_algebraic():
    rng = CounterRng(313)
    a = rng.hermitian(6)
    phi = 0.4 * rng.hermitian(6)
    r = f_difference(a, phi, (lambda x: np.asarray(x) ** 2, lambda x: 2 * np.asarray(x)))
    expected = a @ phi + phi @ a + phi @ phi
    assert op_norm(r.direct - expected) <= 1e-10 * (1 + op_norm(expected))
    assert op_norm(r.doi - expected) <= 1e-10 * (1 + op_norm(expected))


def test_f_difference_exp_random():
    rng = CounterRng(317)
    a = rng.hermitian(8)
    phi = rng.hermitian(8)
    phi = 0.3 * phi / op_norm(phi)
    r = f_difference(a, phi, EXP)
    assert r.residual <= 1e-8 * (1 + op_norm(r.direct))


def test_f_difference_measure_swap():
    # the same difference with the two spectral measures interchanged
    rng = CounterRng(331)
    a = rng.hermitian(6)
    phi = 0.5 * rng.hermitian(6)
    b = a + phi
    r = f_difference(a, phi, EXP)
    kernel = divided_difference_kernel(np.exp, np.exp)
    swapped = doi_apply(kernel, pvm_from_hermitian(b), pvm_from_hermitian(a), phi)
    assert op_norm(swapped - r.doi) <= 1e-9 * (1 + op_norm(r.doi))


def test_f_difference_wiener_norm_bound():
    rng = CounterRng(337)
    a = rng.hermitian(8)
    phi = rng.hermitian(8)
    for f in (wiener_sin(1.0), wiener_cauchy()):
        r = f_difference(a, phi, f)
        bound = op_norm(phi) * f.abs_first_moment
        assert op_norm(r.doi) <= bound * (1 + 1e-8) + 1e-10


def test_exp_difference_examples():
    rng = CounterRng(347)
    a = rng.hermitian(4)
    phi = rng.hermitian(4)
    r0 = exp_difference_bound(a, phi, 0.0)
    assert r0.lhs_norm <= 1e-12 and r0.bound == 0.0 and r0.ok

    # commuting 1x1: |e^{i pi} - 1| = 2 <= pi
    r = exp_difference_bound(np.array([[0.0]]), np.array([[np.pi]]), 1.0)
    assert abs(r.lhs_norm - 2.0) <= 1e-12
    assert abs(r.bound - np.pi) <= 1e-12
    assert r.ok


def test_exp_difference_monte_carlo():
    rng = CounterRng(349)
    for trial in range(50):
        dim = 2 + int(rng.integers(0, 15, 1)[0])
        a = rng.hermitian(dim)
        phi = rng.hermitian(dim)
        t = float(-4.0 + 8.0 * rng.uniform(1)[0])
        assert exp_difference_bound(a, phi, t).ok


def test_dk_identity_function_gives_phi_prime():
    rng = CounterRng(353)
    path = linear_path(rng.hermitian(5), rng.hermitian(5))
    out = dk_derivative(path, 0.3, (lambda x: np.asarray(x, dtype=float),
                                    lambda x: np.ones_like(np.asarray(x, float))))
    assert op_norm(out - path.derivative(0.3)) <= 1e-10 * (1 + op_norm(out))


def test_dk_square_product_rule():
    rng = CounterRng(359)
    h0 = rng.hermitian(5)
    v = rng.hermitian(5)
    path = linear_path(h0, v)
    s = 0.6
    out = dk_derivative(path, s, (lambda x: np.asarray(x) ** 2,
                                  lambda x: 2.0 * np.asarray(x)))
    a = path.hamiltonian(s)
    expected = a @ v + v @ a
    assert op_norm(out - expected) <= 1e-9 * (1 + op_norm(expected))


def test_dk_matches_finite_difference():
    rng = CounterRng(367)
    path = linear_path(rng.hermitian(6), rng.hermitian(6), s_domain=(-1.0, 2.0))
    s = 0.4
    assert min_eigenvalue_gap(path.hamiltonian(s)) > 1e-6
    dk = dk_derivative(path, s, EXP)
    fd = fd_derivative(path, s, EXP, h=1e-4)
    assert op_norm(dk - fd) <= 1e-6 * (1 + op_norm(dk))


def test_dk_hermitian_for_real_function():
    rng = CounterRng(373)
    path = trig_path(rng.hermitian(6), rng.hermitian(6), omega=0.9)
    out = dk_derivative(path, 0.5, EXP)
    assert op_norm(out - out.conj().T) <= 1e-10 * (1 + op_norm(out))


def test_dk_domain_error():
    rng = CounterRng(379)
    path = linear_path(rng.hermitian(3), rng.hermitian(3), s_domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        dk_derivative(path, 2.0, EXP)


def test_fd_constant_path_is_zero():
    rng = CounterRng(383)
    path = linear_path(rng.hermitian(4), np.zeros((4, 4)))
    out = fd_derivative(path, 0.5, EXP, h=1e-4)
    assert op_norm(out) <= 1e-9


def test_fd_second_order_convergence():
    rng = CounterRng(389)
    path = polynomial_path(rng.hermitian(6), [rng.hermitian(6), 0.3 * rng.hermitian(6)],
                           s_domain=(-1.0, 2.0))
    s = 0.5
    dk = dk_derivative(path, s, EXP)
    e1 = op_norm(fd_derivative(path, s, EXP, h=1e-3) - dk)
    e2 = op_norm(fd_derivative(path, s, EXP, h=5e-4) - dk)
    assert 3.0 <= e1 / e2 <= 5.0


def test_fd_domain_error_near_edge():
    rng = CounterRng(397)
    path = linear_path(rng.hermitian(3), rng.hermitian(3), s_domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        fd_derivative(path, 1.0, EXP, h=1e-2)


def test_duhamel_zero_t():
    rng = CounterRng(401)
    path = linear_path(rng.hermitian(4), rng.hermitian(4))
    assert op_norm(duhamel_derivative(path, 0.5, 0.0)) <= 1e-14


def test_duhamel_scalar_case():
    # 1x1 path H(s) = s: d/ds e^{its} = i t e^{its}
    path = linear_path(np.array([[0.0]]), np.array([[1.0]]))
    t = 1.7
    s = 0.4
    out = duhamel_derivative(path, s, t)
    assert abs(out[0, 0] - 1j * t * np.exp(1j * t * s)) <= 1e-12


def test_duhamel_matches_dk_exponential_kernel():
    rng = CounterRng(409)
    path = linear_path(rng.hermitian(6), 0.7 * rng.hermitian(6))
    s = 0.3
    for t in (0.5, 1.0, -2.0):
        f_t = (lambda x, t=t: np.exp(1j * t * np.asarray(x)),
               lambda x, t=t: 1j * t * np.exp(1j * t * np.asarray(x)))
        dk = dk_derivative(path, s, f_t)
        du = duhamel_derivative(path, s, t)
        assert op_norm(dk - du) <= 1e-8 * (1 + op_norm(dk))


def test_duhamel_direct_derivative_oracle():
    # against a central difference of s -> exp(i t H(s))
    rng = CounterRng(419)
    path = linear_path(rng.hermitian(5), rng.hermitian(5), s_domain=(-1.0, 2.0))
    s, t, h = 0.5, 1.2, 1e-4
    f = lambda hmat: matrix_function(hermitian_eig(hmat), lambda x: np.exp(1j * t * x))
    fd = (f(path.hamiltonian(s + h)) - f(path.hamiltonian(s - h))) / (2 * h)
    du = duhamel_derivative(path, s, t)
    assert op_norm(du - fd) <= 1e-6 * (1 + op_norm(du))


def test_path_family_derivative_consistency():
    # phi_prime matches central differences of phi for each built-in family
    rng = CounterRng(421)
    dim = 5
    builders = [
        linear_path(rng.hermitian(dim), rng.hermitian(dim), s_domain=(-1.0, 2.0)),
        polynomial_path(rng.hermitian(dim),
                        [rng.hermitian(dim), rng.hermitian(dim)], s_domain=(-1.0, 2.0)),
        trig_path(rng.hermitian(dim), rng.hermitian(dim), omega=1.4, s_domain=(-1.0, 2.0)),
    ]
    h = 1e-4
    for path in builders:
        for s in (0.2, 0.9):
            fd = (path.phi(s + h) - path.phi(s - h)) / (2 * h)
            exact = path.derivative(s)
            assert op_norm(fd - exact) <= 1e-6 * (1 + op_norm(exact))
