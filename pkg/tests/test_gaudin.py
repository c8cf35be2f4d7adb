import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import polynomial as npoly

from kdgaudin.errors import DegenerateParameterError, DomainError, NoRealSolutionError, SingularAnsatzError
from kdgaudin.gaudin import (
    GaudinModel,
    build_U_ansatz,
    check_prop32,
    cocycle_residual,
    dual_R_residual,
    eigenvalue_lambda,
    eigenvalue_mu,
    find_beta,
    poly_R,
    poly_eval_scale,
    prop32_value,
    solve,
)
from kdgaudin.kappa import random_kappa, validate
from kdgaudin.verify import check_gaudin_diagonalization

from conftest import dirichlet_p, distinct_alpha, random_alpha, simplex_p


def R_direct(z, p, alpha):
    out = p[0] * math.prod(1 + a * z for a in alpha[1:])
    for j in range(1, len(p)):
        out += p[j] * math.prod(1 + alpha[k] * z for k in range(1, len(p)) if k != j)
    return out


@given(simplex_p(d_max=6), st.data())
def test_poly_R_matches_definition(p, data):
    alpha = data.draw(distinct_alpha(len(p) - 1))
    coeffs = poly_R(p, alpha)
    assert coeffs.size == len(p)
    for z in (-1.3, 0.2, 2.7):
        assert npoly.polyval(z, coeffs) == pytest.approx(R_direct(z, p, alpha), rel=1e-12, abs=1e-12)


@given(simplex_p(d_max=8), st.data())
def test_roots_are_real_interlaced_and_accurate(p, data):
    d = len(p) - 1
    alpha = data.draw(distinct_alpha(d))
    beta, info = find_beta(p, alpha)
    assert info.path == "bisection"
    coeffs = poly_R(p, alpha)
    for b in beta:
        assert abs(npoly.polyval(b, coeffs)) <= 1e-12 * poly_eval_scale(coeffs, b)
    # 1/beta lies strictly between consecutive poles of sum p_k / (z + alpha_k)
    z = np.sort(1.0 / beta)
    poles = np.sort(-alpha)
    assert np.all(poles[:-1] < z) and np.all(z < poles[1:])


def test_companion_agrees_with_bisection(rng):
    for d in range(1, 7):
        p, alpha = dirichlet_p(rng, d), random_alpha(rng, d)
        b1, _ = find_beta(p, alpha, method="bisection")
        b2, info = find_beta(p, alpha, method="companion")
        assert info.path == "companion"
        np.testing.assert_allclose(b1, b2, rtol=1e-8)


def test_d1_closed_form():
    for p0, a1 in [(0.5, 1.0), (0.3, -2.0), (0.9, 0.25)]:
        m = solve([p0, 1 - p0], [0.0, a1])
        assert m.beta[1] == pytest.approx(-1 / (p0 * a1), rel=1e-14)
        assert m.kappa.U[1, 1] == pytest.approx(-p0 / (1 - p0), rel=1e-13)


def test_symmetric_worked_case():
    m = solve([1 / 3] * 3, [0.0, 1.0, -1.0])
    np.testing.assert_allclose(m.beta[1:], [-math.sqrt(3), math.sqrt(3)], rtol=0, atol=1e-12)
    np.testing.assert_allclose(m.p_tilde, [1 / 3] * 3, rtol=0, atol=1e-12)
    assert prop32_value(m.kappa, 1, 2) == 0.5
    assert prop32_value(m.kappa, 2, 1) == 0.5


@given(simplex_p(d_max=7), st.data())
def test_solved_model_conditions(p, data):
    alpha = data.draw(distinct_alpha(len(p) - 1))
    m = solve(p, alpha)
    assert validate(m.kappa).worst <= 1e-10
    assert check_prop32(m.kappa, alpha).worst <= 1e-10
    assert cocycle_residual(m) <= 1e-10
    rep = dual_R_residual(m, z_samples=[-0.7, 0.4, 1.9])
    assert max(rep.coefficient_residual, rep.root_residual, rep.sample_residual) <= 1e-10


def test_non_gaudin_kappa_violates_conditions(rng):
    alpha = np.array([0.0, 1.0, -0.5, 2.0])
    for seed in range(20):
        kappa = random_kappa(dirichlet_p(rng, 3), seed=seed)
        assert check_prop32(kappa, alpha).residual_a > 1e-3


def test_eigenvalue_forms_agree(rng):
    for d in range(1, 6):
        m = solve(dirichlet_p(rng, d), random_alpha(rng, d))
        for _ in range(10):
            n = rng.integers(0, 4, d)
            zeta = rng.standard_normal(d + 1)
            lam = eigenvalue_lambda(n, m.kappa, m.alpha, zeta)
            mu = eigenvalue_mu(n, m, zeta)
            assert lam == pytest.approx(mu, rel=1e-12, abs=1e-13)


def test_d1_eigenvalue():
    m = solve([0.4, 0.6], [0.0, 1.5])
    for n in range(4):
        assert eigenvalue_mu((n,), m, [0.3, 1.3]) == pytest.approx(-(1.0) * n / 1.5, rel=1e-14)


@pytest.mark.parametrize("d,N", [(1, 5), (2, 6), (3, 3), (5, 2)])
def test_spectral_equations(d, N, rng):
    m = solve(dirichlet_p(rng, d), random_alpha(rng, d))
    for check in check_gaudin_diagonalization(m, N):
        assert check.passed, check


def test_nonpositive_p_uses_companion():
    m = solve([2.0, -0.5, -0.5], [0.0, 1.0, -1.0])
    assert m.solver["path"] == "companion"
    np.testing.assert_allclose(sorted(m.beta[1:]), [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-12)
    with pytest.raises(DomainError):
        find_beta([2.0, -0.5, -0.5], [0.0, 1.0, -1.0], method="bisection")


def test_complex_roots_raise():
    with pytest.raises(NoRealSolutionError) as info:
        solve([1.5, -1.0, 0.5], [0.0, 1.0, 2.0])
    assert np.iscomplexobj(info.value.roots)


def test_alpha_validation():
    with pytest.raises(DomainError):
        solve([0.5, 0.5], [1.0, 2.0])
    with pytest.raises(DegenerateParameterError):
        solve([0.2, 0.3, 0.5], [0.0, 1.0, 1.0])
    with pytest.raises(DegenerateParameterError):
        solve([0.5, 0.5], [0.0, 0.0])
    with pytest.raises(DomainError):
        solve([0.5, 0.6], [0.0, 1.0])


def test_singular_ansatz():
    with pytest.raises(SingularAnsatzError):
        build_U_ansatz([0.0, 1.0], [0.0, -1.0])


def test_model_json_round_trip(rng):
    m = solve(dirichlet_p(rng, 4), random_alpha(rng, 4))
    back = GaudinModel.from_json(m.to_json())
    np.testing.assert_array_equal(back.beta, m.beta)
    assert back.kappa == m.kappa
    assert back.solver == m.solver
