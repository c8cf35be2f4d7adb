"""Multivariate Krawtchouk polynomials as terminating Aomoto-Gelfand sums.

    P_n(x) = sum_A  prod_j (-n_j)_{col_j A}  prod_i (-x_i)_{row_i A} / (-N)_{|A|}
                    * prod_{i,j} (1 - u_ij)^{a_ij} / a_ij!

over d x d matrices A of nonnegative integers with |A| <= N.

Two evaluation routes are provided.  ``eval_poly`` walks the matrices A
with an odometer, updating each term incrementally and summing with
``math.fsum``.  ``basis_table`` groups the same sum by row sums r and column
sums c of A:

    T = F_n @ M @ F_x^T,   F[y, r] = prod_i (-y_i)_{r_i},
    M[c, r] = sum_{A: rows r, cols c} prod (1-u)^a / a!  /  (-N)_{|r|}

which evaluates a whole table with one pass over A and two matrix products.

Where the terms of a sum nearly cancel, the binary64 value keeps few
correct digits.  ``basis_table`` flags such entries with the bound
``eps * sum|terms|`` and re-evaluates them in exact rational arithmetic on
the (exactly representable) binary inputs before rounding once.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import factorial

from .errors import DomainError
from .kappa import KrawtchoukParam
from .lattice import LatticeGrid, _multinomial_weight, formal_weight
from .operators import build_all_L


def _is_integer(N) -> bool:
    return float(N).is_integer() and N >= 0


def eval_poly(n, x, kappa: KrawtchoukParam, N, prune: bool = True) -> float:
    """P_n(x; kappa, N) by direct summation.

    For integer N both n and x must lie in V_N^d.  For any other N (the
    formal regime) the sum still terminates through the column caps n_j.
    ``prune=False`` enumerates every A with |A| <= N (or <= min(|n|, |x|) in
    the formal regime) and lets the vanishing Pochhammer factors kill the
    extra terms; the result is bit-identical to the pruned walk.
    """
    d = kappa.d
    n = tuple(int(v) for v in n)
    x = tuple(int(v) for v in x)
    if len(n) != d or len(x) != d or min(n + x) < 0:
        raise DomainError(f"n={n}, x={x} must be nonnegative {d}-tuples")
    if _is_integer(N):
        N = int(N)
        if sum(n) > N or sum(x) > N:
            raise DomainError(f"|n| = {sum(n)} or |x| = {sum(x)} exceeds N = {N}")
        total_cap = N
    else:
        total_cap = min(sum(n), sum(x))
    w = 1.0 - kappa.U[1:, 1:]
    row = [0] * d
    col = [0] * d
    terms = []

    def walk(pos, total, term):
        if pos == d * d:
            terms.append(term)
            return
        i, j = divmod(pos, d)
        walk(pos + 1, total, term)
        limit = total_cap - total
        if prune:
            limit = min(limit, x[i] - row[i], n[j] - col[j])
        a = 0
        while a < limit:
            term *= (col[j] - n[j]) * (row[i] - x[i]) / (total - N) * w[i, j] / (a + 1)
            a += 1
            row[i] += 1
            col[j] += 1
            total += 1
            walk(pos + 1, total, term)
        row[i] -= a
        col[j] -= a

    walk(0, 0, 1.0)
    return math.fsum(terms)


def eval_exact(n, x, kappa: KrawtchoukParam, N) -> Fraction:
    """The same pruned sum in rational arithmetic on the exact binary values
    of kappa and N; no rounding happens until the caller converts."""
    d = kappa.d
    n = tuple(int(v) for v in n)
    x = tuple(int(v) for v in x)
    Nq = Fraction(N)
    total_cap = min(sum(n), sum(x))
    w = [[1 - Fraction(float(kappa.U[i + 1, j + 1])) for j in range(d)] for i in range(d)]
    row = [0] * d
    col = [0] * d
    acc = [Fraction(0)]

    def walk(pos, total, term):
        if pos == d * d:
            acc[0] += term
            return
        i, j = divmod(pos, d)
        walk(pos + 1, total, term)
        limit = min(total_cap - total, x[i] - row[i], n[j] - col[j])
        a = 0
        while a < limit:
            term = term * (col[j] - n[j]) * (row[i] - x[i]) / (total - Nq) * w[i][j] / (a + 1)
            a += 1
            row[i] += 1
            col[j] += 1
            total += 1
            walk(pos + 1, total, term)
        row[i] -= a
        col[j] -= a

    walk(0, 0, Fraction(1))
    return acc[0]


def eval_neg_poly(n, x, kappa: KrawtchoukParam, c, s, prune: bool = True) -> float:
    """Negative multinomial variant: Eq. for P_n with N = -s."""
    total = math.fsum(c)
    if s <= 0 or total >= 1:
        raise DomainError(f"need s > 0 and |c| < 1, got s={s}, |c|={total}")
    return eval_poly(n, x, kappa, -float(s), prune=prune)


def _poch_int_table(m_max: int, k_max: int) -> np.ndarray:
    """table[m, k] = (-m)_k."""
    table = np.ones((m_max + 1, k_max + 1))
    for m in range(m_max + 1):
        for k in range(1, k_max + 1):
            table[m, k] = table[m, k - 1] * (k - 1 - m)
    return table


def _falling_matrix(points: np.ndarray, exps: np.ndarray, poch: np.ndarray) -> np.ndarray:
    F = np.ones((points.shape[0], exps.shape[0]))
    for j in range(points.shape[1]):
        F *= poch[points[:, j][:, None], exps[:, j][None, :]]
    return F


def transfer_matrix(kappa: KrawtchoukParam, N, radius: int,
                    absolute: bool = False) -> tuple[LatticeGrid, np.ndarray]:
    """M[c, r] summed over A with |A| <= radius, indexed over V_radius^d.

    ``absolute=True`` sums the magnitudes of the terms instead.
    """
    d = kappa.d
    inner = LatticeGrid(d, radius)
    A = LatticeGrid(d * d, radius, max_size=2_000_000).points
    base = (1.0 - kappa.U[1:, 1:]).reshape(-1)
    weights = np.prod(np.power(base[None, :], A) / factorial(A), axis=1)
    total = A.sum(axis=1)
    denom = np.ones(radius + 1)
    for k in range(1, radius + 1):
        denom[k] = denom[k - 1] * (-N + k - 1)
    A3 = A.reshape(-1, d, d)
    r = inner.rank_many(A3.sum(axis=2))
    c = inner.rank_many(A3.sum(axis=1))
    M = np.zeros((inner.size, inner.size))
    contrib = weights / denom[total]
    np.add.at(M, (c, r), np.abs(contrib) if absolute else contrib)
    return inner, M


@dataclass(frozen=True)
class BasisTable:
    """values[n_rank, x_rank] = P_n(x)."""

    n_grid: LatticeGrid
    x_grid: LatticeGrid
    values: np.ndarray

    @property
    def grid(self) -> LatticeGrid:
        return self.n_grid

    def to_csv(self, extra_sections=()) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n\\x"] + [_label(x) for x in self.x_grid])
        for n, row in zip(self.n_grid, self.values):
            writer.writerow([_label(n)] + [repr(float(v)) for v in row])
        for title, header, rows in extra_sections:
            writer.writerow([])
            writer.writerow([f"# {title}"] + list(header))
            for label, vals in rows:
                writer.writerow([label] + [repr(float(v)) for v in vals])
        return buf.getvalue()


def _label(idx) -> str:
    return "-".join(str(int(v)) for v in idx)


# entries whose rounding bound exceeds this fraction of their value are refined
REFINE_RTOL = 1e-11
# safety factor on eps * sum|terms| for the few roundings per term
ROUNDING_FACTOR = 16 * np.finfo(float).eps


def basis_table(kappa: KrawtchoukParam, N, grid: LatticeGrid, x_grid: LatticeGrid | None = None,
                method: str = "factored", refine: bool = True) -> BasisTable:
    """All P_n(x) for n in ``grid`` and x in ``x_grid`` (default: same grid).

    With integer N both grids must be V_N^d.  In the formal regime they are
    arbitrary truncation balls.  ``refine`` re-evaluates exactly every entry
    of the factored table whose rounding bound exceeds ``REFINE_RTOL`` of its
    magnitude.
    """
    x_grid = grid if x_grid is None else x_grid
    if grid.d != kappa.d or x_grid.d != kappa.d:
        raise DomainError("grid dimension does not match kappa")
    if _is_integer(N) and (grid.N > N or x_grid.N > N):
        raise DomainError(f"grids exceed N = {N}")
    if method == "direct":
        vals = np.array([[eval_poly(n, x, kappa, N) for x in x_grid] for n in grid])
        return BasisTable(grid, x_grid, vals)
    if method != "factored":
        raise ValueError(f"unknown method {method!r}")
    values = _factored(kappa, N, grid, x_grid, absolute=False)
    if refine:
        bound = ROUNDING_FACTOR * _factored(kappa, N, grid, x_grid, absolute=True)
        rows, cols = np.nonzero(bound > REFINE_RTOL * np.abs(values))
        for a, b in zip(rows, cols):
            values[a, b] = float(eval_exact(grid.points[a], x_grid.points[b], kappa, N))
    return BasisTable(grid, x_grid, values)


def _factored(kappa, N, grid, x_grid, absolute):
    radius = min(grid.N, x_grid.N)
    inner, M = transfer_matrix(kappa, N, radius, absolute=absolute)
    poch = _poch_int_table(max(grid.N, x_grid.N), radius)
    if absolute:
        poch = np.abs(poch)
    Fn = _falling_matrix(grid.points, inner.points, poch)
    Fx = _falling_matrix(x_grid.points, inner.points, poch)
    return Fn @ M @ Fx.T


def magnitude_table(kappa: KrawtchoukParam, N, grid: LatticeGrid,
                    x_grid: LatticeGrid | None = None) -> np.ndarray:
    """S[n, x] = sum over A of |term|, the scale of the rounding error in P_n(x).

    A value P_n(x) that is small through cancellation is only known to about
    eps * S[n, x], so pointwise identities are judged against S.
    """
    x_grid = grid if x_grid is None else x_grid
    return _factored(kappa, N, grid, x_grid, absolute=True)


def norm_sq(n, kappa: KrawtchoukParam, N) -> float:
    """p_0^N / W_{p~,N}(n)."""
    p0 = kappa.p[0]
    if _is_integer(N) and np.all(kappa.p_tilde > 0):
        return p0**N / _multinomial_weight(n, kappa.p_tilde, int(N))
    return p0**N / formal_weight(n, kappa.p_tilde, N)


def norm_vector(kappa: KrawtchoukParam, N, grid: LatticeGrid) -> np.ndarray:
    return np.array([norm_sq(n, kappa, N) for n in grid])


def gram_matrix(table: BasisTable, weights) -> np.ndarray:
    """<P_n, P_m> over the table's x grid."""
    V = table.values
    return (V * np.asarray(weights)[None, :]) @ V.T


def bispectral_x_operator(kappa: KrawtchoukParam, i: int, grid: LatticeGrid, N=None, ops=None):
    """(p~_i / p_0) sum_{k<l} u_ki u_li L_kl, which has eigenvalue n_i on P_n."""
    U = kappa.U
    if ops is None:
        ops = build_all_L(kappa.p, grid, N)
    out = None
    for (k, l), L in ops.items():
        term = (U[k, i] * U[l, i]) * L
        out = term if out is None else out + term
    return (kappa.p_tilde[i] / kappa.p[0]) * out


def bispectral_n_operator(kappa: KrawtchoukParam, i: int, grid: LatticeGrid, N=None, ops=None):
    """(p_i / p_0) sum_{k<l} u_ik u_il L~_kl, which has eigenvalue x_i on P_n."""
    U = kappa.U
    if ops is None:
        ops = build_all_L(kappa.p_tilde, grid, N)
    out = None
    for (k, l), L in ops.items():
        term = (U[i, k] * U[i, l]) * L
        out = term if out is None else out + term
    return (kappa.p[i] / kappa.p[0]) * out

