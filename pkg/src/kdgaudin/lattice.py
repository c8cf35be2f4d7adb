"""Simplex lattice V_N^d, multinomial weights and the weighted inner product.

Points are enumerated in graded-lexicographic order: first by total degree
``|x|``, then lexicographically on the entries.  Rank and unrank are closed
form (hockey-stick sums over a Pascal table), so ``rank_many`` is vectorised
and never needs a lookup dictionary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, LatticeSizeError

MAX_GRID_SIZE = 200_000
# Above this N weights switch from an exact integer multinomial to log-gamma.
LOG_WEIGHT_THRESHOLD = 30

MultiIndex = tuple  # tuple[int, ...] of length d


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    """All tuples of ``parts`` nonnegative ints summing to ``total``, lex ascending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _pascal(n: int, kmax: int) -> np.ndarray:
    """table[a, b] = binom(a, b) for a <= n, b <= kmax."""
    table = np.zeros((n + 1, kmax + 1), dtype=np.int64)
    table[:, 0] = 1
    for a in range(1, n + 1):
        table[a, 1:] = table[a - 1, 1:] + table[a - 1, :-1]
    return table


@dataclass(frozen=True)
class LatticeGrid:
    """The lattice ``{x in N_0^d : |x| <= N}`` with a fixed rank order."""

    d: int
    N: int
    max_size: int = MAX_GRID_SIZE
    points: np.ndarray = field(init=False, repr=False, compare=False)
    _binom: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 1 or self.N < 0:
            raise DomainError(f"need d >= 1 and N >= 0, got d={self.d}, N={self.N}")
        size = math.comb(self.N + self.d, self.d)
        if size > self.max_size:
            raise LatticeSizeError(
                f"grid V_{self.N}^{self.d} has binomial({self.N + self.d},{self.d}) = {size} "
                f"points, above the cap {self.max_size}"
            )
        pts = np.array(
            [c for g in range(self.N + 1) for c in _compositions(g, self.d)],
            dtype=np.int64,
        ).reshape(size, self.d)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_binom", _pascal(self.N + self.d + 1, self.d))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.size

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.points)

    @property
    def degrees(self) -> np.ndarray:
        return self.points.sum(axis=1)

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.d and all(v >= 0 for v in x) and sum(x) <= self.N

    def rank_many(self, X: np.ndarray) -> np.ndarray:
        """Ranks of the rows of ``X``; rows must lie in the grid."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.d)
        B = self._binom
        d = self.d
        g = X.sum(axis=1)
        # number of points with degree < g is binom(g - 1 + d, d)
        rank = np.where(g > 0, B[np.maximum(g - 1 + d, 0), d], 0)
        rem = g.copy()
        for k in range(d - 1):
            m = d - k - 1
            xk = X[:, k]
            rank += B[rem + m, m] - B[rem - xk + m, m]
            rem = rem - xk
        return rank

    def rank(self, x: Sequence[int]) -> int:
        if not self.contains(x):
            raise DomainError(f"{tuple(x)} is not in V_{self.N}^{self.d}")
        return int(self.rank_many(np.asarray(x))[0])

    def unrank(self, k: int) -> tuple:
        if not 0 <= k < self.size:
            raise DomainError(f"rank {k} out of range for grid of size {self.size}")
        return tuple(int(v) for v in self.points[k])

    def grade_slice(self, g: int) -> slice:
        """Contiguous rank range of the points with ``|x| == g``."""
        lo = math.comb(g - 1 + self.d, self.d) if g > 0 else 0
        return slice(lo, math.comb(g + self.d, self.d))


def enumerate_lattice(d: int, N: int, max_size: int = MAX_GRID_SIZE) -> LatticeGrid:
    return LatticeGrid(d, N, max_size=max_size)


@dataclass(frozen=True)
class ModelParams:
    """Distribution parameters.

    In ``multinomial`` mode ``p`` has d+1 positive entries summing to one and
    ``N`` is a positive integer.  In ``negative-multinomial`` mode the caller
    gives ``c`` and ``s``; ``p`` and ``N`` are then the formal values
    ``p_j = -c_j / (1 - |c|)``, ``p_0 = 1 / (1 - |c|)`` and ``N = -s``.
    """

    p: tuple
    N: float
    mode: str = "multinomial"
    c: tuple | None = None
    s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if abs(math.fsum(self.p) - 1.0) > 1e-12:
            raise DomainError(f"p must sum to 1, got sum {math.fsum(self.p)!r}")
        if self.mode == "multinomial":
            if any(v <= 0 for v in self.p):
                raise DomainError("multinomial mode needs every p_j > 0")
            if int(self.N) != self.N or self.N < 1:
                raise DomainError(f"N must be a positive integer, got {self.N}")
            object.__setattr__(self, "N", int(self.N))
        elif self.mode == "negative-multinomial":
            if self.c is None or self.s is None:
                raise DomainError("negative-multinomial mode needs c and s")
        else:
            raise DomainError(f"unknown mode {self.mode!r}")

    @classmethod
    def multinomial(cls, p, N) -> "ModelParams":
        return cls(tuple(p), N)

    @classmethod
    def negative(cls, c, s) -> "ModelParams":
        c = tuple(float(v) for v in c)
        s = float(s)
        total = math.fsum(c)
        if s <= 0 or any(v <= 0 for v in c):
            raise DomainError("negative multinomial needs s > 0 and all c_j > 0")
        if total >= 1:
            raise DomainError(f"negative multinomial needs |c| < 1, got {total}")
        rest = [-v / (1.0 - total) for v in c]
        # p_0 chosen so that the formal p sums to one exactly as stored
        p0 = 1.0 - math.fsum(rest)
        return cls((p0, *rest), -s, mode="negative-multinomial", c=c, s=s)

    @property
    def d(self) -> int:
        return len(self.p) - 1

    @property
    def p_array(self) -> np.ndarray:
        return np.array(self.p)


def parse_fraction(text: str) -> Fraction:
    """Parse ``"1/3"``, ``"0.25"`` or ``"2"`` exactly."""
    return Fraction(text.strip())


def _check_point(x, N):
    x = tuple(int(v) for v in x)
    if any(v < 0 for v in x):
        raise DomainError(f"negative entry in {x}")
    if N is not None and sum(x) > N:
        raise DomainError(f"|x| = {sum(x)} exceeds N = {N}")
    return x


def multinomial_weight(x: Sequence[int], params: ModelParams) -> float:
    """W_{p,N}(x) = binom(N; N-|x|, x) p_0^{N-|x|} prod p_j^{x_j}."""
    if params.mode != "multinomial":
        raise DomainError("multinomial_weight needs multinomial params")
    return _multinomial_weight(x, params.p, params.N)


def _multinomial_weight(x, p, N: int) -> float:
    x = _check_point(x, N)
    x0 = N - sum(x)
    counts = (x0, *x)
    if N > LOG_WEIGHT_THRESHOLD:
        logw = math.lgamma(N + 1) + sum(
            k * math.log(pj) - math.lgamma(k + 1) for k, pj in zip(counts, p)
        )
        return math.exp(logw)
    coeff = math.factorial(N)
    for k in counts:
        coeff //= math.factorial(k)
    return float(coeff) * math.prod(pj**k for pj, k in zip(p, counts))


def formal_weight(x: Sequence[int], p: Sequence[float], N: float) -> float:
    """Multinomial weight continued to real N via
    ``binom(N; N-|x|, x) = (-1)^{|x|} (-N)_{|x|} / prod x_j!``.

    Agrees with the multinomial weight for integer N and reproduces the
    negative multinomial weight under ``N = -s``.  Needs ``p_0 > 0``.
    """
    x = _check_point(x, None)
    k = sum(x)
    coeff = (-1) ** k * _poch(-N, k)
    for v in x:
        coeff /= math.factorial(v)
    return coeff * p[0] ** (N - k) * math.prod(pj**v for pj, v in zip(p[1:], x))


def _poch(a: float, k: int) -> float:
    out = 1.0
    for t in range(k):
        out *= a + t
    return out


def neg_multinomial_weight(x: Sequence[int], params: ModelParams) -> float:
    """(1-|c|)^s (s)_{|x|} prod c_j^{x_j} / x_j!"""
    if params.mode != "negative-multinomial":
        raise DomainError("neg_multinomial_weight needs negative-multinomial params")
    return _neg_multinomial_weight(x, params.c, params.s)


def _neg_multinomial_weight(x, c, s) -> float:
    x = _check_point(x, None)
    total = math.fsum(c)
    if total >= 1:
        raise DomainError(f"|c| = {total} must be < 1")
    out = (1.0 - total) ** s * _poch(s, sum(x))
    for cj, v in zip(c, x):
        out *= cj**v / math.factorial(v)
    return out


def weight_vector(params: ModelParams, grid: LatticeGrid) -> np.ndarray:
    """Weights over ``grid`` in rank order.

    Multinomial mode needs ``grid.N == params.N``; negative-multinomial mode
    treats ``grid`` as the truncation ball of radius ``grid.N``.
    """
    if params.mode == "multinomial":
        if grid.N != params.N or grid.d != params.d:
            raise DomainError("grid does not match params (d, N)")
        if params.N > LOG_WEIGHT_THRESHOLD:
            return _log_weights(np.asarray(params.p), params.N, grid)
        return np.array([_multinomial_weight(x, params.p, params.N) for x in grid])
    if grid.d != params.d:
        raise DomainError("grid dimension does not match params")
    return np.array([_neg_multinomial_weight(x, params.c, params.s) for x in grid])


def _log_weights(p: np.ndarray, N: int, grid: LatticeGrid) -> np.ndarray:
    X = grid.points
    counts = np.column_stack([N - X.sum(axis=1), X])
    logw = gammaln(N + 1) + (counts * np.log(p) - gammaln(counts + 1)).sum(axis=1)
    return np.exp(logw)


def inner_product(f, g, params: ModelParams, grid: LatticeGrid, weights=None) -> float:
    """sum_x f(x) g(x) W(x), accumulated with exact rounding (order independent)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.size,) or g.shape != (grid.size,):
        raise DomainError(
            f"vectors must have length {grid.size}, got {f.shape} and {g.shape}"
        )
    w = weight_vector(params, grid) if weights is None else weights
    return math.fsum((f * g * w).tolist())
