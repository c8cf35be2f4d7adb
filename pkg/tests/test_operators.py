import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kdgaudin.errors import DegenerateParameterError, DomainError
from kdgaudin.lattice import LatticeGrid, ModelParams, weight_vector
from kdgaudin.operators import (
    build_all_L,
    build_gaudin,
    build_hamiltonian,
    build_jucys_murphy,
    build_L,
    commutator_residual,
    fro,
    gaudin_combination,
    symmetrized_residual,
    weighted_spectrum,
)

from conftest import simplex_p


def apply_literal(i, j, p, N, f: dict):
    """The shift-difference operator written out point by point in exact arithmetic."""
    out = {}
    for x, fx in f.items():
        ext = [N - sum(x), *x]
        total = Fraction(0)
        for a, b in ((i, j), (j, i)):
            if ext[b] == 0:
                continue
            y = list(x)
            if a > 0:
                y[a - 1] += 1
            if b > 0:
                y[b - 1] -= 1
            total += p[a] * ext[b] * (f[tuple(y)] - fx)
        out[x] = total
    return out


@pytest.mark.parametrize("d,N", [(1, 3), (2, 3), (3, 2)])
def test_matrix_matches_literal_operator(d, N, rng):
    p = [Fraction(k + 1, (d + 1) * (d + 2) // 2) for k in range(d + 1)]
    grid = LatticeGrid(d, N)
    vals = [Fraction(int(v), 7) for v in rng.integers(-20, 20, grid.size)]
    f = dict(zip(grid, vals))
    for i, j in itertools.combinations(range(d + 1), 2):
        A = build_L(i, j, [float(v) for v in p], grid)
        got = A @ np.array([float(v) for v in vals])
        want = apply_literal(i, j, p, N, f)
        np.testing.assert_allclose(got, [float(want[x]) for x in grid], rtol=1e-13, atol=1e-13)


def test_d1_N1_hand_matrix():
    A = build_L(0, 1, [0.25, 0.75], LatticeGrid(1, 1)).toarray()
    np.testing.assert_array_equal(A, [[-0.75, 0.75], [0.25, -0.25]])


def test_symmetric_in_indices(rng):
    p = rng.dirichlet(np.ones(4))
    grid = LatticeGrid(3, 3)
    assert (build_L(1, 3, p, grid) != build_L(3, 1, p, grid)).nnz == 0


def test_rows_sum_to_zero(rng):
    p = rng.dirichlet(np.ones(4))
    grid = LatticeGrid(3, 4)
    for L in build_all_L(p, grid).values():
        np.testing.assert_allclose(L @ np.ones(grid.size), 0.0, atol=1e-15)


def test_bad_indices():
    grid = LatticeGrid(2, 2)
    with pytest.raises(DomainError):
        build_L(1, 1, [0.3, 0.3, 0.4], grid)
    with pytest.raises(DomainError):
        build_L(0, 3, [0.3, 0.3, 0.4], grid)
    with pytest.raises(DomainError):
        build_L(0, 1, [0.5, 0.5], grid)


@given(simplex_p(d_max=3), st.integers(1, 4))
def test_self_adjoint_for_multinomial_weight(p, N):
    params = ModelParams.multinomial(p, N)
    grid = LatticeGrid(params.d, N)
    w = weight_vector(params, grid)
    for L in build_all_L(params, grid).values():
        assert symmetrized_residual(L, w) <= 1e-12


@given(simplex_p(d_min=2, d_max=4), st.integers(1, 3))
def test_kd_triangle_relation(p, N):
    grid = LatticeGrid(len(p) - 1, N)
    ops = build_all_L(p, grid)
    for (i, j), L in ops.items():
        for k in set(range(grid.d + 1)) - {i, j}:
            other = ops[tuple(sorted((i, k)))] + ops[tuple(sorted((j, k)))]
            assert commutator_residual(L, other) <= 1e-12


def test_hamiltonian_spectrum_and_centrality(rng):
    p = rng.dirichlet(np.ones(3))
    params = ModelParams.multinomial(p, 4)
    grid = LatticeGrid(2, 4)
    ops = build_all_L(params, grid)
    H = build_hamiltonian(params, grid, ops=ops)
    ev = weighted_spectrum(H, weight_vector(params, grid))
    expected = sorted(-k for k in range(5) for _ in range(k + 1))
    np.testing.assert_allclose(np.sort(ev), expected, atol=1e-10)
    for L in ops.values():
        assert commutator_residual(H, L) <= 1e-12


def test_jucys_murphy_commute(rng):
    p = rng.dirichlet(np.ones(5))
    grid = LatticeGrid(4, 2)
    ops = build_all_L(p, grid)
    J = [build_jucys_murphy(k, p, grid, ops=ops) for k in range(1, 5)]
    for a, b in itertools.combinations(J, 2):
        assert commutator_residual(a, b) <= 1e-12


def test_gaudin_is_linear_in_zeta(rng):
    p = rng.dirichlet(np.ones(4))
    grid = LatticeGrid(3, 3)
    alpha = np.array([0.0, 1.0, -0.5, 2.0])
    ops = build_all_L(p, grid)
    z1, z2 = rng.standard_normal((2, 4))
    lhs = build_gaudin(alpha, 2.0 * z1 - 3.0 * z2, p, grid, ops=ops)
    rhs = 2.0 * build_gaudin(alpha, z1, p, grid, ops=ops) - 3.0 * build_gaudin(alpha, z2, p, grid, ops=ops)
    assert fro(lhs - rhs) <= 1e-13 * fro(lhs)


def test_gaudin_constant_zeta_is_zero(rng):
    p = rng.dirichlet(np.ones(3))
    grid = LatticeGrid(2, 3)
    G = build_gaudin([0.0, 1.0, -1.0], np.full(3, 0.7), p, grid)
    assert G.nnz == 0


def test_gaudin_elements_commute(rng):
    p = rng.dirichlet(np.ones(4))
    grid = LatticeGrid(3, 3)
    alpha = [0.0, 1.0, -0.5, 2.0]
    ops = build_all_L(p, grid)
    G = [gaudin_combination(alpha, np.eye(4)[k], ops, grid.size) for k in range(4)]
    for a, b in itertools.combinations(G, 2):
        assert commutator_residual(a, b) <= 1e-12


def test_gaudin_needs_distinct_alpha():
    grid = LatticeGrid(2, 2)
    with pytest.raises(DegenerateParameterError):
        build_gaudin([0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.2, 0.3, 0.5], grid)


def test_truncated_mode_interior_rows_match_formal_operator():
    params = ModelParams.negative([0.25, 0.25], 2)
    small = LatticeGrid(2, 4)
    big = LatticeGrid(2, 6)
    A = build_L(1, 2, params, small).toarray()
    B = build_L(1, 2, params, big).toarray()
    inner = small.degrees < small.N
    # interior rows of the small ball are complete, so they agree with the big ball
    np.testing.assert_array_equal(A[inner], B[:small.size][inner][:, :small.size])
