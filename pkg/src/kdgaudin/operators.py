"""Difference operators of the multinomial representation as CSR matrices.

Matrix convention: entry ``(r, c)`` is the coefficient of ``f(y_c)`` in
``(L f)(x_r)``, so applying an operator to grid values is ``A @ f``.  A table
``T[n, x]`` whose rows are functions of ``x`` is acted on as ``T @ A.T``.

``N`` defaults to the grid's own N.  Passing a different (possibly
non-integer) ``N`` switches to truncated mode: the grid is then a truncation
ball of the infinite lattice, shifts that leave it are dropped, and rows on
the outermost shell ``|x| == grid.N`` are incomplete.
"""
from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as spnorm

from .errors import DegenerateParameterError, DomainError
from .lattice import LatticeGrid, ModelParams

SparseOperator = sp.csr_matrix


def _resolve(p, grid: LatticeGrid, N):
    if isinstance(p, ModelParams):
        if N is None and p.mode == "negative-multinomial":
            N = p.N
        p = p.p
    p = np.asarray(p, dtype=float)
    if p.shape != (grid.d + 1,):
        raise DomainError(f"expected {grid.d + 1} parameters, got {p.shape}")
    truncated = N is not None and N != grid.N
    return p, (grid.N if N is None else N), truncated


def _extended_points(grid: LatticeGrid, N) -> np.ndarray:
    X = grid.points
    x0 = N - X.sum(axis=1)
    return np.column_stack([x0, X]).astype(float)


def build_L(i: int, j: int, p, grid: LatticeGrid, N=None) -> sp.csr_matrix:
    """Matrix of ``f -> p_i x_j (f(x+e_i-e_j) - f(x)) + p_j x_i (f(x+e_j-e_i) - f(x))``
    with ``x_0 = N - |x|`` and no shift in slot 0."""
    d = grid.d
    if i == j:
        raise DomainError(f"L_{{i,j}} needs i != j, got i = j = {i}")
    if not (0 <= i <= d and 0 <= j <= d):
        raise DomainError(f"indices ({i}, {j}) out of range 0..{d}")
    p, N, truncated = _resolve(p, grid, N)
    X = grid.points
    Xe = _extended_points(grid, N)
    n = grid.size
    rows_all, cols_all, vals_all = [], [], []
    diag = np.zeros(n)
    for a, b in ((i, j), (j, i)):
        coef = p[a] * Xe[:, b]
        shift = np.zeros(d, dtype=np.int64)
        if a > 0:
            shift[a - 1] += 1
        if b > 0:
            shift[b - 1] -= 1
        src = np.nonzero(coef)[0]
        target = X[src] + shift
        inside = (target >= 0).all(axis=1) & (target.sum(axis=1) <= grid.N)
        if not inside.all():
            # off-lattice shifts carry coefficient x_b = 0 on a complete grid
            assert truncated, "nonzero coefficient on an off-lattice shift"
        diag[src] -= coef[src]
        keep = src[inside]
        rows_all.append(keep)
        cols_all.append(grid.rank_many(target[inside]))
        vals_all.append(coef[keep])
    rows_all.append(np.arange(n))
    cols_all.append(np.arange(n))
    vals_all.append(diag)
    A = sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(n, n),
    ).tocsr()
    A.eliminate_zeros()
    A.sort_indices()
    return A


def build_dual_L(i: int, j: int, kappa, grid: LatticeGrid, N=None) -> sp.csr_matrix:
    """Same operator acting on degree indices n, with the dual weights p~."""
    return build_L(i, j, kappa.p_tilde, grid, N)


def build_all_L(p, grid: LatticeGrid, N=None) -> dict:
    """``{(i, j): L_ij}`` for all ``0 <= i < j <= d``."""
    return {
        (i, j): build_L(i, j, p, grid, N)
        for i, j in itertools.combinations(range(grid.d + 1), 2)
    }


def _check_distinct(alpha, tol=1e-12):
    alpha = np.asarray(alpha, dtype=float)
    scale = np.max(np.abs(alpha))
    for i, j in itertools.combinations(range(len(alpha)), 2):
        if abs(alpha[i] - alpha[j]) < tol * scale:
            raise DegenerateParameterError(
                f"alpha_{i} = {alpha[i]!r} and alpha_{j} = {alpha[j]!r} coincide"
            )
    return alpha


def gaudin_combination(alpha, zeta, ops: dict, dim: int) -> sp.csr_matrix:
    """sum_{i<j} (zeta_i - zeta_j) / (alpha_i - alpha_j) * ops[i, j]."""
    alpha = _check_distinct(alpha)
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != alpha.shape:
        raise DomainError("alpha and zeta must have the same length")
    out = sp.csr_matrix((dim, dim))
    for (i, j), L in ops.items():
        coef = (zeta[i] - zeta[j]) / (alpha[i] - alpha[j])
        if coef != 0.0:
            out = out + coef * L
    out.eliminate_zeros()
    return out


def build_gaudin(alpha, zeta, p, grid: LatticeGrid, N=None, ops=None) -> sp.csr_matrix:
    """G(alpha, p, N; zeta) acting on the variables x."""
    if len(alpha) != grid.d + 1:
        raise DomainError(f"alpha must have {grid.d + 1} entries")
    if ops is None:
        ops = build_all_L(p, grid, N)
    return gaudin_combination(alpha, zeta, ops, grid.size)


def build_dual_gaudin(beta, zeta, kappa, grid: LatticeGrid, N=None, ops=None) -> sp.csr_matrix:
    """G~(beta, p~, N; zeta) acting on the degree indices n."""
    return build_gaudin(beta, zeta, kappa.p_tilde, grid, N, ops=ops)


def build_hamiltonian(p, grid: LatticeGrid, N=None, ops=None) -> sp.csr_matrix:
    if ops is None:
        ops = build_all_L(p, grid, N)
    out = sp.csr_matrix((grid.size, grid.size))
    for L in ops.values():
        out = out + L
    return out


def build_jucys_murphy(k: int, p, grid: LatticeGrid, N=None, ops=None) -> sp.csr_matrix:
    """sum_{j<k} L_{j,k}."""
    if not 1 <= k <= grid.d:
        raise DomainError(f"Jucys-Murphy index k={k} out of range 1..{grid.d}")
    if ops is None:
        ops = {(j, k): build_L(j, k, p, grid, N) for j in range(k)}
    out = sp.csr_matrix((grid.size, grid.size))
    for j in range(k):
        out = out + ops[(j, k)]
    return out


def commutator(A, B) -> sp.csr_matrix:
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    return sp.csr_matrix(A @ B - B @ A)


def fro(A) -> float:
    if sp.issparse(A):
        return float(spnorm(A, "fro"))
    return float(np.linalg.norm(A))


def commutator_residual(A, B) -> float:
    """||[A, B]||_F / (||A||_F ||B||_F), 0 when either operand vanishes."""
    scale = fro(A) * fro(B)
    return fro(commutator(A, B)) / scale if scale > 0 else 0.0


def symmetrized_residual(A, weight) -> float:
    """Self-adjointness defect of ``A`` against ``diag(weight)``."""
    weight = np.asarray(weight, dtype=float)
    if np.any(weight <= 0):
        raise DomainError("weights must be strictly positive")
    norm = fro(A)
    if norm == 0:
        return 0.0
    S = symmetrize(A, weight)
    return fro(S - S.T) / norm


def symmetrize(A, weight) -> sp.csr_matrix:
    """D^{1/2} A D^{-1/2}; symmetric iff A is self-adjoint for the weight."""
    r = np.sqrt(np.asarray(weight, dtype=float))
    return sp.csr_matrix(sp.diags(r) @ sp.csr_matrix(A) @ sp.diags(1.0 / r))


def weighted_spectrum(A, weight) -> np.ndarray:
    """Eigenvalues of a weight-self-adjoint operator (dense symmetric solve)."""
    S = symmetrize(A, weight).toarray()
    return np.linalg.eigvalsh(0.5 * (S + S.T))
