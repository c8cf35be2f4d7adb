"""Parameter points kappa = (nu, P, P~, U) of multivariate Krawtchouk polynomials."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameterError, InvalidKappaError, NonOrthogonalColumnsError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrawtchoukParam:
    nu: float
    p: np.ndarray
    p_tilde: np.ndarray
    U: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("p", "p_tilde", "U"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "nu", float(self.nu))
        d1 = self.p.shape[0]
        if self.p_tilde.shape != (d1,) or self.U.shape != (d1, d1):
            raise InvalidKappaError(
                f"inconsistent shapes p{self.p.shape} p~{self.p_tilde.shape} U{self.U.shape}"
            )

    @property
    def d(self) -> int:
        return self.p.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, KrawtchoukParam):
            return NotImplemented
        return (
            self.nu == other.nu
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.p_tilde, other.p_tilde)
            and np.array_equal(self.U, other.U)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "nu": self.nu,
            "p": self.p.tolist(),
            "p_tilde": self.p_tilde.tolist(),
            "U": self.U.tolist(),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KrawtchoukParam":
        kappa = cls(data["nu"], data["p"], data["p_tilde"], data["U"], dict(data.get("meta", {})))
        if kappa.d != data.get("d", kappa.d):
            raise InvalidKappaError(f"declared d={data['d']} but arrays have d={kappa.d}")
        return kappa

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "KrawtchoukParam":
        return cls.from_dict(json.loads(text))


@dataclass
class KappaReport:
    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def worst(self) -> float:
        return max(self.residuals.values())


def validate(kappa: KrawtchoukParam, tol: float = DEFAULT_TOL) -> KappaReport:
    """Residuals of every defining condition of a kappa point."""
    U, p, pt, nu = kappa.U, kappa.p, kappa.p_tilde, kappa.nu
    d1 = p.shape[0]
    border = max(np.max(np.abs(U[0, :] - 1.0)), np.max(np.abs(U[:, 0] - 1.0)))
    M = nu * (p[:, None] * U) @ (pt[:, None] * U.T)
    res = {
        "border": float(border),
        "matrix_identity": float(np.max(np.abs(M - np.eye(d1)))),
        "sum_p": abs(float(np.sum(p)) - 1.0),
        "sum_p_tilde": abs(float(np.sum(pt)) - 1.0),
        "p0_nu": abs(p[0] * nu - 1.0),
        "p_tilde0_nu": abs(pt[0] * nu - 1.0),
    }
    return KappaReport(res, tol)


def dual_gram_residual(kappa: KrawtchoukParam) -> float:
    """max_{i,k} |sum_j p~_j u_ij u_kj - delta_ik p_0 / p_k|, relative to max(1, target)."""
    U, p, pt = kappa.U, kappa.p, kappa.p_tilde
    G = (U * pt) @ U.T
    target = np.diag(p[0] / p)
    return float(np.max(np.abs(G - target) / np.maximum(1.0, np.abs(target))))


def _column_gram(p, U):
    return U.T @ (p[:, None] * U)


def complete_from_U(p, U, tol: float = DEFAULT_TOL, allow_nonpositive: bool = False,
                    meta: dict | None = None) -> KrawtchoukParam:
    """Build kappa from p and a bordered U whose columns are p-orthogonal.

    ``p~_k = p_0 / sum_j p_j u_jk^2`` and ``nu = 1 / p_0``.
    """
    p = np.asarray(p, dtype=float)
    U = np.asarray(U, dtype=float)
    d1 = p.shape[0]
    if U.shape != (d1, d1):
        raise InvalidKappaError(f"U must be {d1}x{d1}, got {U.shape}")
    if not allow_nonpositive and np.any(p <= 0):
        raise InvalidKappaError("p must be positive (pass allow_nonpositive for the formal regime)")
    if np.any(p == 0):
        raise InvalidKappaError("p entries must be nonzero")
    if not (np.all(U[0, :] == 1.0) and np.all(U[:, 0] == 1.0)):
        raise InvalidKappaError("U must have first row and first column equal to one")
    G = _column_gram(p, U)
    norms = np.diag(G)
    # judged per column against its absolute summands; never trips for positive p
    if np.any(np.abs(norms) <= tol * (np.abs(p) @ U**2)):
        raise DegenerateParameterError(f"column with vanishing p-norm: {norms}")
    # relative to the sum of absolute summands, which is what rounding sees
    scale = np.abs(U).T @ (np.abs(p)[:, None] * np.abs(U))
    off = np.abs(G - np.diag(norms)) / scale
    if np.max(off) > tol:
        i, k = np.unravel_index(np.argmax(off), off.shape)
        raise NonOrthogonalColumnsError(
            f"columns {i} and {k} of U are not p-orthogonal (relative {off[i, k]:.3e})"
        )
    p_tilde = p[0] / norms
    return KrawtchoukParam(1.0 / p[0], p, p_tilde, U, dict(meta or {}))


def random_kappa(p, seed=None, allow_nonpositive: bool = False, max_tries: int = 100,
                 tol: float = DEFAULT_TOL) -> KrawtchoukParam:
    """A random kappa point for fixed p.

    Columns of U are p-orthogonalised random vectors (against the all-ones
    column first), each rescaled to have leading entry one.
    """
    p = np.asarray(p, dtype=float)
    d1 = p.shape[0]
    rng = np.random.default_rng(seed)

    def ip(a, b):
        return float(np.sum(p * a * b))

    # the last column is forced by the others, so a bad draw restarts the whole basis
    for _attempt in range(max_tries):
        cols = [np.ones(d1)]
        for _ in range(1, d1):
            v = rng.standard_normal(d1)
            for _sweep in range(2):
                for w in cols:
                    v = v - ip(v, w) / ip(w, w) * w
            vmax = np.max(np.abs(v))
            # leading entry must be usable as a normaliser; a tiny p_j forces
            # entries of order p_j^{-1/2}, so only near-zero leads are rejected
            if abs(v[0]) < 1e-6 * vmax or abs(ip(v, v)) <= 1e-8 * vmax**2:
                break
            v = v / v[0]
            v[0] = 1.0
            cols.append(v)
        if len(cols) == d1:
            break
    else:
        raise DegenerateParameterError(f"could not draw a normalisable basis in {max_tries} tries")
    U = np.column_stack(cols)
    U[0, :] = 1.0
    return complete_from_U(p, U, tol=tol, allow_nonpositive=allow_nonpositive,
                           meta={"generator": "random_kappa", "seed": seed})


def involution(kappa: KrawtchoukParam, tol: float | None = DEFAULT_TOL) -> KrawtchoukParam:
    """(nu, P, P~, U) -> (nu, P~, P, U^T)."""
    if tol is not None:
        report = validate(kappa, tol)
        if not report.passed:
            raise InvalidKappaError(f"kappa fails validation: {report.residuals}")
    meta = dict(kappa.meta)
    meta["involuted"] = not meta.get("involuted", False)
    if not meta["involuted"]:
        del meta["involuted"]
    return KrawtchoukParam(kappa.nu, kappa.p_tilde, kappa.p, kappa.U.T, meta)
