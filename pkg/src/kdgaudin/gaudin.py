"""Closed-form diagonalisation of the multinomial Gaudin model.

Given distinct alpha (alpha_0 = 0), the roots beta_1..beta_d of

    R(z; p, alpha) = p_0 prod_k (1 + alpha_k z) + sum_j p_j prod_{k != j} (1 + alpha_k z)

give ``u_ij = 1 / (1 + alpha_i beta_j)``, and the Krawtchouk polynomials of
the resulting kappa point are joint eigenfunctions of every Gaudin operator
G(alpha, p, N; zeta) in x and of G~(beta, p~, N; zeta) in n.

For positive p the roots are isolated by bisection on the rational function

    f(z) = p_0 / z + sum_k p_k / (z + alpha_k),

which decreases from +inf to -inf between consecutive poles; its zeros are
the reciprocals of the beta's.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateParameterError, DomainError, NoRealSolutionError, SingularAnsatzError
from .kappa import KrawtchoukParam, complete_from_U

ALPHA_GAP = 1e-9
NEWTON_STEPS = 3
IMAG_TOL = 1e-10


def _validate_alpha(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size < 2:
        raise DomainError("alpha must be a vector of length d+1 >= 2")
    if alpha[0] != 0.0:
        raise DomainError(f"alpha_0 must be 0, got {alpha[0]!r}")
    scale = np.max(np.abs(alpha))
    if np.any(np.abs(alpha[1:]) <= ALPHA_GAP * scale):
        raise DegenerateParameterError(f"alpha_1..alpha_d must be nonzero: {alpha}")
    for i, j in itertools.combinations(range(1, alpha.size), 2):
        if abs(alpha[i] - alpha[j]) <= ALPHA_GAP * scale:
            raise DegenerateParameterError(f"alpha_{i} and alpha_{j} are not distinct: {alpha}")
    return alpha


def poly_R(p, alpha) -> np.ndarray:
    """Coefficients of R(z; p, alpha), constant term first."""
    p = np.asarray(p, dtype=float)
    alpha = _validate_alpha(alpha)
    if p.shape != alpha.shape:
        raise DomainError("p and alpha must both have length d+1")
    d = alpha.size - 1
    coeffs = np.zeros(d + 1)
    full = np.array([1.0])
    for a in alpha[1:]:
        full = npoly.polymul(full, [1.0, a])
    coeffs += p[0] * full
    for j in range(1, d + 1):
        part = np.array([1.0])
        for k in range(1, d + 1):
            if k != j:
                part = npoly.polymul(part, [1.0, alpha[k]])
        coeffs[: part.size] += p[j] * part
    return coeffs


def poly_eval_scale(coeffs, z) -> float:
    """sum_k |c_k| |z|^k, the natural magnitude for judging |R(z)|."""
    return float(npoly.polyval(abs(z), np.abs(coeffs)))


def _f(z, p, alpha):
    return p[0] / z + sum(p[k] / (z + alpha[k]) for k in range(1, alpha.size))


def _f_offset(t, p, shifts):
    """f at z = t - alpha_a, written with the exact pole shifts alpha_k - alpha_a."""
    return math.fsum(pk / (t + sk) for pk, sk in zip(p, shifts))


def _bisect_offset(lo, hi, p, shifts):
    """Zero of the decreasing function t -> f(t - alpha_a) on (lo, hi)."""
    a, b = lo, hi
    steps = 0
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            return mid, steps
        steps += 1
        if _f_offset(mid, p, shifts) > 0:
            a = mid
        else:
            b = mid


def _newton_polish(t, p, shifts, lo, hi, steps=NEWTON_STEPS):
    """Guarded Newton steps on the offset equation; a step is kept only if it
    stays in the bracket and does not increase |f|."""
    val = abs(_f_offset(t, p, shifts))
    for _ in range(steps):
        der = -math.fsum(pk / (t + sk) ** 2 for pk, sk in zip(p, shifts))
        if der == 0 or val == 0:
            break
        cand = t - _f_offset(t, p, shifts) / der
        cval = abs(_f_offset(cand, p, shifts))
        if not (lo <= cand <= hi) or cval > val:
            break
        t, val = cand, cval
    return t


def _bracketed_roots(p, alpha):
    """Zeros of f between consecutive poles, each as (anchor pole, offset).

    The first bisection step picks the half of the pole gap holding the zero;
    the rest runs on the offset t from the nearer pole, so z = t - alpha_a and
    z + alpha_a = t carry full relative precision even when the zero hugs the
    pole.
    """
    order = np.argsort(-alpha, kind="stable")  # poles -alpha ascending
    out, iters = [], 0
    for left, right in zip(order[:-1], order[1:]):
        gap = alpha[left] - alpha[right]
        z_mid = -alpha[left] + 0.5 * gap
        f_mid = _f(z_mid, p, alpha)
        if f_mid == 0.0:
            out.append((int(left), 0.5 * gap))
            continue
        if f_mid > 0:
            anchor, lo, hi = right, z_mid + alpha[right], 0.0
        else:
            anchor, lo, hi = left, 0.0, z_mid + alpha[left]
        shifts = alpha - alpha[anchor]
        t, k = _bisect_offset(lo, hi, p, shifts)
        t = _newton_polish(t, p, shifts, lo, hi)
        out.append((int(anchor), t))
        iters += k + 1
    return out, iters


@dataclass
class RootInfo:
    path: str
    iterations: int
    residuals: list
    anchors: list | None = None
    offsets: list | None = None


def find_beta(p, alpha, tol: float = 1e-12, method: str = "auto"):
    """The d roots of R(z; p, alpha), sorted ascending, and solver details.

    ``method`` is ``"bisection"``, ``"companion"`` or ``"auto"`` (bisection
    when every p_j > 0, companion-matrix eigenvalues otherwise).
    """
    p = np.asarray(p, dtype=float)
    alpha = _validate_alpha(alpha)
    coeffs = poly_R(p, alpha)
    d = alpha.size - 1
    anchors = offsets = None
    if method == "auto":
        method = "bisection" if np.all(p > 0) else "companion"
    if method == "bisection":
        if np.any(p <= 0):
            raise DomainError("bracketed root isolation needs every p_j > 0")
        roots, iters = _bracketed_roots(p, alpha)
        zs = np.array([t - alpha[a] for a, t in roots])
        beta = 1.0 / zs
        order = np.argsort(beta, kind="stable")
        beta = beta[order]
        anchors = [roots[k][0] for k in order]
        offsets = [roots[k][1] for k in order]
    elif method == "companion":
        roots = npoly.polyroots(coeffs)
        bad = np.abs(roots.imag) > IMAG_TOL * (1.0 + np.abs(roots.real))
        if np.any(bad):
            raise NoRealSolutionError(f"R has non-real roots {roots[bad]}", roots)
        beta = np.sort(roots.real)
        dcoef = npoly.polyder(coeffs)
        for _ in range(NEWTON_STEPS):
            der = npoly.polyval(beta, dcoef)
            step = np.where(der != 0, npoly.polyval(beta, coeffs) / np.where(der != 0, der, 1), 0)
            beta = beta - step
        beta = np.sort(beta)
        iters = NEWTON_STEPS
    else:
        raise ValueError(f"unknown method {method!r}")

    if beta.size != d or np.any(np.abs(beta) == 0):
        raise NoRealSolutionError("zero root", beta)
    if np.any(np.diff(beta) <= 1e-12 * np.max(np.abs(beta))):
        raise NoRealSolutionError("coincident roots", beta)
    prod = np.outer(alpha[1:], beta)
    if np.any(np.abs(1.0 + prod) < 1e-12 * (1.0 + np.abs(prod))):
        raise NoRealSolutionError("alpha_i beta_j = -1 for some i, j", beta)
    residuals = [abs(npoly.polyval(b, coeffs)) / poly_eval_scale(coeffs, b) for b in beta]
    if max(residuals) > tol:
        raise NoRealSolutionError(f"root residual {max(residuals):.3e} above {tol:.1e}", beta)
    return beta, RootInfo(method, iters, residuals, anchors, offsets)


def _ansatz_from_offsets(alpha, anchors, offsets) -> np.ndarray:
    """u_ij = z_j / (z_j + alpha_i) with z_j = t_j - alpha_{a_j}, evaluated as
    (t_j - alpha_a) / (t_j + (alpha_i - alpha_a)) to avoid cancellation."""
    d1 = alpha.size
    U = np.ones((d1, d1))
    for j, (a, t) in enumerate(zip(anchors, offsets), start=1):
        U[1:, j] = (t - alpha[a]) / (t + (alpha[1:] - alpha[a]))
    return U


def build_U_ansatz(alpha, beta) -> np.ndarray:
    """u_ij = 1 / (1 + alpha_i beta_j), with alpha_0 = beta_0 = 0."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha[0] != 0.0 or beta[0] != 0.0:
        raise DomainError("alpha_0 and beta_0 must both be 0")
    denom = 1.0 + np.outer(alpha, beta)
    if np.any(np.abs(denom) < 1e-12):
        i, j = np.unravel_index(np.argmin(np.abs(denom)), denom.shape)
        raise SingularAnsatzError(f"1 + alpha_{i} beta_{j} = {denom[i, j]:.3e}")
    return 1.0 / denom


@dataclass(frozen=True, eq=False)
class GaudinModel:
    alpha: np.ndarray
    beta: np.ndarray
    kappa: KrawtchoukParam
    p: np.ndarray
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("alpha", "beta", "p"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def d(self) -> int:
        return self.alpha.size - 1

    @property
    def p_tilde(self) -> np.ndarray:
        return self.kappa.p_tilde

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "kappa": self.kappa.to_dict(),
            "p": self.p.tolist(),
            "solver": dict(self.solver),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaudinModel":
        return cls(
            data["alpha"],
            data["beta"],
            KrawtchoukParam.from_dict(data["kappa"]),
            data["p"],
            dict(data.get("solver", {})),
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "GaudinModel":
        return cls.from_dict(json.loads(text))


def solve(p, alpha, tol: float = 1e-12, method: str = "auto") -> GaudinModel:
    p = np.asarray(p, dtype=float)
    if abs(math.fsum(p) - 1.0) > 1e-12:
        raise DomainError(f"p must sum to 1, got {math.fsum(p)!r}")
    alpha = _validate_alpha(alpha)
    beta_d, info = find_beta(p, alpha, tol=tol, method=method)
    beta = np.concatenate([[0.0], beta_d])
    if info.anchors is not None:
        U = _ansatz_from_offsets(alpha, info.anchors, info.offsets)
    else:
        U = build_U_ansatz(alpha, beta)
    kappa = complete_from_U(
        p, U, allow_nonpositive=bool(np.any(p <= 0)), meta={"generator": "gaudin.solve"}
    )
    solver = {"path": info.path, "iterations": info.iterations, "root_residuals": info.residuals}
    return GaudinModel(alpha, beta, kappa, p, solver)


def mu(n, alpha, beta, p, zeta) -> float:
    """-sum_{i,j>=1} (zeta_i - zeta_0) p_i n_j beta_j / (1 + alpha_i beta_j)."""
    n = np.asarray(n, dtype=float)
    alpha, beta, p, zeta = (np.asarray(v, dtype=float) for v in (alpha, beta, p, zeta))
    coef = (zeta[1:] - zeta[0]) * p[1:]
    M = beta[None, 1:] / (1.0 + np.outer(alpha[1:], beta[1:]))
    return -float(coef @ M @ n)


def eigenvalue_mu(n, model: GaudinModel, zeta) -> float:
    return mu(n, model.alpha, model.beta, model.p, zeta)


def dual_eigenvalue_mu(x, model: GaudinModel, zeta) -> float:
    """Eigenvalue of G~(beta, p~, N; zeta) on P_n(x), i.e. mu_x(beta, alpha, p~; zeta)."""
    return mu(x, model.beta, model.alpha, model.p_tilde, zeta)


def eigenvalue_lambda(n, kappa: KrawtchoukParam, alpha, zeta) -> float:
    """-sum_{i,j>=1} (zeta_i - zeta_0)/(alpha_i - alpha_0) p_i n_j (1 - u_ij)."""
    n = np.asarray(n, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    coef = (zeta[1:] - zeta[0]) / (alpha[1:] - alpha[0]) * kappa.p[1:]
    return -float(coef @ (1.0 - kappa.U[1:, 1:]) @ n)


@dataclass
class ConditionReport:
    residual_a: float
    residual_b: float
    vacuous_b: bool

    @property
    def worst(self) -> float:
        return max(self.residual_a, self.residual_b)


def check_prop32(kappa: KrawtchoukParam, alpha) -> ConditionReport:
    """Residuals of the two diagonalisability conditions.

    (a) (alpha_k - alpha_0)/(alpha_k - alpha_l) = (p_k/p_0) sum_j p~_j u_kj^2 u_lj
    (b) sum_j p~_j u_ij u_kj u_lj = 0 for distinct i, k, l >= 1

    Each residual is relative to max(1, sum of absolute summands).
    """
    alpha = np.asarray(alpha, dtype=float)
    U, p, pt = kappa.U, kappa.p, kappa.p_tilde
    d = kappa.d
    res_a = 0.0
    for k, l in itertools.permutations(range(1, d + 1), 2):
        terms = (p[k] / p[0]) * pt * U[k] ** 2 * U[l]
        lhs = (alpha[k] - alpha[0]) / (alpha[k] - alpha[l])
        scale = max(1.0, abs(lhs), float(np.sum(np.abs(terms))))
        res_a = max(res_a, abs(lhs - math.fsum(terms)) / scale)
    res_b = 0.0
    triples = list(itertools.combinations(range(1, d + 1), 3))
    for i, k, l in triples:
        terms = pt * U[i] * U[k] * U[l]
        scale = max(1.0, float(np.sum(np.abs(terms))))
        res_b = max(res_b, abs(math.fsum(terms)) / scale)
    return ConditionReport(res_a, res_b, vacuous_b=not triples)


def prop32_value(kappa: KrawtchoukParam, k: int, l: int) -> float:
    """(p_k/p_0) sum_j p~_j u_kj^2 u_lj."""
    U, p, pt = kappa.U, kappa.p, kappa.p_tilde
    return (p[k] / p[0]) * math.fsum(pt * U[k] ** 2 * U[l])


def cocycle_residual(model: GaudinModel) -> float:
    """Max relative defect of u_kj u_lj = w_kl u_kj + w_lk u_lj (and its dual
    with beta, rows and columns exchanged)."""
    U = model.kappa.U
    worst = 0.0
    for vec, M in ((model.alpha, U), (model.beta, U.T)):
        for k, l in itertools.permutations(range(vec.size), 2):
            wkl = vec[k] / (vec[k] - vec[l])
            wlk = vec[l] / (vec[l] - vec[k])
            lhs = M[k] * M[l]
            rhs = wkl * M[k] + wlk * M[l]
            scale = np.maximum(1.0, np.abs(wkl * M[k]) + np.abs(wlk * M[l]))
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return worst


@dataclass
class DualRReport:
    sample_residual: float
    coefficient_residual: float
    root_residual: float


def dual_R_residual(model: GaudinModel, z_samples=()) -> DualRReport:
    """Compare R(z; p~, beta) with prod_k (1 - z / alpha_k)."""
    coeffs = poly_R(model.p_tilde, model.beta)
    target = np.array([1.0])
    for a in model.alpha[1:]:
        target = npoly.polymul(target, [1.0, -1.0 / a])
    coef_scale = max(1.0, float(np.max(np.abs(target))))
    coef_res = float(np.max(np.abs(coeffs - target))) / coef_scale
    sample = 0.0
    for z in np.atleast_1d(np.asarray(z_samples, dtype=float)):
        lhs = npoly.polyval(z, coeffs)
        rhs = npoly.polyval(z, target)
        sample = max(sample, abs(lhs - rhs) / max(1.0, poly_eval_scale(target, z)))
    root = max(
        abs(npoly.polyval(a, coeffs)) / max(1.0, poly_eval_scale(coeffs, a))
        for a in model.alpha[1:]
    )
    return DualRReport(sample, coef_res, root)
