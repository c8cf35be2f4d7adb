"""Named, tolerance-driven numerical checks of every identity the library
relies on, collected into a machine-readable report.

Residual conventions: operator identities are divided by the product of
operand Frobenius norms, pointwise identities by the magnitude of the
summands that produced each entry.  That keeps every tolerance scale-free.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from functools import cached_property

import numpy as np

from . import __version__
from .errors import KDError
from .gaudin import (
    GaudinModel,
    check_prop32,
    cocycle_residual,
    dual_R_residual,
    eigenvalue_lambda,
    eigenvalue_mu,
    dual_eigenvalue_mu,
    poly_eval_scale,
    poly_R,
    solve,
)
from .kappa import KrawtchoukParam, dual_gram_residual, involution, random_kappa, validate
from .krawtchouk import (
    basis_table,
    bispectral_n_operator,
    bispectral_x_operator,
    gram_matrix,
    magnitude_table,
    norm_vector,
)
from .lattice import LatticeGrid, ModelParams, weight_vector
from .operators import (
    build_all_L,
    build_dual_gaudin,
    build_gaudin,
    build_hamiltonian,
    build_jucys_murphy,
    commutator,
    commutator_residual,
    fro,
    symmetrized_residual,
    weighted_spectrum,
)

TOL_ENV = "KDGAUDIN_TOL"
SAMPLE_SIZE = 50


@dataclass
class Tolerances:
    operator: float = 1e-10
    hypergeometric: float = 1e-9
    truncated: float = 1e-6
    self_adjoint: float = 1e-12
    degree: float = 1e-9
    spectrum: float = 1e-8
    root: float = 1e-12
    eigen_agreement: float = 1e-12
    duality: float = 1e-12
    # independence is reported as a condition number sigma_max / sigma_min
    condition: float = 1e8

    def with_overrides(self, text: str | None) -> "Tolerances":
        """Apply ``"operator=1e-12,truncated=1e-7"`` style overrides."""
        if not text:
            return self
        names = {f.name for f in fields(self)}
        updates = {}
        for item in text.split(","):
            if not item.strip():
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ValueError(f"bad tolerance override {item!r}; known keys: {sorted(names)}")
            updates[key] = float(value)
        return replace(self, **updates)

    @classmethod
    def from_env(cls) -> "Tolerances":
        return cls().with_overrides(os.environ.get(TOL_ENV))


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    context: dict = field(default_factory=dict)
    note: str = ""


def _check(name, residual, tolerance, context=None, note="") -> Check:
    residual = float(residual)
    return Check(name, residual, float(tolerance), bool(residual <= tolerance),
                 dict(context or {}), note)


def _vacuous(name, tolerance, context, why) -> Check:
    return Check(name, 0.0, float(tolerance), True, dict(context), f"vacuous: {why}")


@dataclass
class VerificationReport:
    checks: list
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def residuals(self) -> dict:
        return {c.name: c.residual for c in self.checks}

    def to_dict(self) -> dict:
        return {"meta": dict(self.meta), "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls([Check(**c) for c in data["checks"]], dict(data.get("meta", {})))

    def to_text(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'residual':>10}  {'tolerance':>9}  status  note"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"{c.name:<{width}}  {c.residual:>10.3e}  {c.tolerance:>9.1e}  {status:<6}  {c.note}"
            )
        total = len(self.checks)
        lines.append(f"{total - len(self.failures)}/{total} checks passed")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# index families

def _sample(family: list, d: int, rng) -> tuple[list, bool]:
    if d >= 4 and len(family) > SAMPLE_SIZE:
        idx = rng.choice(len(family), size=SAMPLE_SIZE, replace=False)
        return [family[k] for k in sorted(idx)], True
    return family, False


def _rng(seed, salt: int):
    return np.random.default_rng([0 if seed is None else int(seed), salt])


def _pair(i, j):
    return (i, j) if i < j else (j, i)


def _ops_for(params: ModelParams, grid: LatticeGrid, ops):
    return build_all_L(params, grid) if ops is None else ops


# ---------------------------------------------------------------------------
# operator algebra

def check_kd_relations(params: ModelParams, grid: LatticeGrid, ops=None, seed=0,
                       tol: Tolerances | None = None) -> list:
    """[L_ij, L_kl] = 0 for disjoint pairs and [L_ij, L_ik + L_jk] = 0."""
    tol = tol or Tolerances()
    d = grid.d
    ops = _ops_for(params, grid, ops)
    ctx = {"d": d, "N": grid.N}
    out = []
    pairs = list(itertools.combinations(range(d + 1), 2))
    disjoint = [(a, b) for a, b in itertools.combinations(pairs, 2) if not set(a) & set(b)]
    if not disjoint:
        out.append(_vacuous("kd_disjoint_commute", tol.operator, ctx, "needs d >= 3"))
    else:
        fam, sampled = _sample(disjoint, d, _rng(seed, 1))
        worst = max(commutator_residual(ops[a], ops[b]) for a, b in fam)
        out.append(_check("kd_disjoint_commute", worst, tol.operator,
                          {**ctx, "tuples": len(fam), "sampled": sampled}))
    triples = [(i, j, k) for i, j in pairs for k in range(d + 1) if k not in (i, j)]
    if not triples:
        out.append(_vacuous("kd_triangle", tol.operator, ctx, "needs d >= 2"))
    else:
        fam, sampled = _sample(triples, d, _rng(seed, 2))
        worst = max(
            commutator_residual(ops[(i, j)], ops[_pair(i, k)] + ops[_pair(j, k)])
            for i, j, k in fam
        )
        out.append(_check("kd_triangle", worst, tol.operator,
                          {**ctx, "tuples": len(fam), "sampled": sampled}))
    return out


def check_central_and_jucys_murphy(params: ModelParams, grid: LatticeGrid, ops=None, seed=0,
                                   tol: Tolerances | None = None) -> list:
    """H commutes with every L_ij; the Jucys-Murphy sums commute pairwise."""
    tol = tol or Tolerances()
    d = grid.d
    ops = _ops_for(params, grid, ops)
    ctx = {"d": d, "N": grid.N}
    H = build_hamiltonian(params, grid, ops=ops)
    fam, sampled = _sample(list(ops), d, _rng(seed, 3))
    worst = max(commutator_residual(H, ops[key]) for key in fam)
    out = [_check("hamiltonian_central", worst, tol.operator,
                  {**ctx, "tuples": len(fam), "sampled": sampled})]
    J = {k: build_jucys_murphy(k, params, grid, ops=ops) for k in range(1, d + 1)}
    jpairs = list(itertools.combinations(range(1, d + 1), 2))
    if not jpairs:
        out.append(_vacuous("jucys_murphy_commute", tol.operator, ctx, "single element"))
    else:
        worst = max(commutator_residual(J[a], J[b]) for a, b in jpairs)
        out.append(_check("jucys_murphy_commute", worst, tol.operator,
                          {**ctx, "tuples": len(jpairs)}))
    return out


def check_self_adjointness(params: ModelParams, grid: LatticeGrid, ops=None, weights=None,
                           tol: Tolerances | None = None) -> Check:
    tol = tol or Tolerances()
    ops = _ops_for(params, grid, ops)
    w = weight_vector(params, grid) if weights is None else weights
    worst = max(symmetrized_residual(L, w) for L in ops.values())
    return _check("self_adjointness", worst, tol.self_adjoint, {"d": grid.d, "N": grid.N})


def monomial_matrix(grid: LatticeGrid) -> np.ndarray:
    """Columns x^m for every exponent m in the grid, rank order, unit-normalised.

    Rank order is graded, so the first ``binom(k+d, d)`` columns span the
    polynomials of degree <= k restricted to the grid.
    """
    X = grid.points.astype(float)
    E = grid.points
    M = np.ones((grid.size, grid.size))
    for j in range(grid.d):
        M *= X[:, j][:, None] ** E[:, j][None, :]
    return M / np.linalg.norm(M, axis=0)


def check_degree_preservation(params: ModelParams, grid: LatticeGrid, ops=None,
                              tol: Tolerances | None = None) -> Check:
    """Each L_ij maps polynomials of degree <= k into themselves, k <= N.

    The image of every monomial of degree k is projected onto the span of
    monomials of degree <= k; the residual is the leftover, relative to
    ``||L||_F ||x^m||``.
    """
    tol = tol or Tolerances()
    ops = _ops_for(params, grid, ops)
    mono = monomial_matrix(grid)
    worst = 0.0
    for k in range(grid.N + 1):
        cut = grid.grade_slice(k).stop
        Q, _ = np.linalg.qr(mono[:, :cut])
        block = mono[:, grid.grade_slice(k)]
        for L in ops.values():
            img = L @ block
            left = img - Q @ (Q.T @ img)
            scale = fro(L)
            if scale > 0:
                worst = max(worst, float(np.max(np.linalg.norm(left, axis=0))) / scale)
    return _check("degree_preservation", worst, tol.degree, {"d": grid.d, "N": grid.N})


def independence_matrix(ops: dict, grid: LatticeGrid) -> np.ndarray:
    """One column per operator: its images of 1, x_1, ..., x_d stacked."""
    basis = np.column_stack([np.ones(grid.size), grid.points.astype(float)])
    return np.column_stack([np.asarray(L @ basis).reshape(-1, order="F") for L in ops.values()])


def check_linear_independence(params: ModelParams, grid: LatticeGrid, ops=None,
                              tol: Tolerances | None = None) -> Check:
    """Singular-value test on the images of affine functions.

    Reported as the condition number sigma_max / sigma_min so that passing
    means ``residual <= tolerance`` like every other entry; the default
    tolerance 1e8 is a ratio sigma_min / sigma_max of at least 1e-8.
    """
    tol = tol or Tolerances()
    ops = _ops_for(params, grid, ops)
    s = np.linalg.svd(independence_matrix(ops, grid), compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    cond = 1.0 / ratio if ratio > 0 else math.inf
    return _check("linear_independence", cond, tol.condition,
                  {"d": grid.d, "N": grid.N, "operators": len(ops), "sv_ratio": ratio})


def _relative(total, terms) -> float:
    scale = sum(fro(t) for t in terms)
    return fro(total) / scale if scale > 0 else 0.0


def cubic_residual(ops: dict, p, i: int, j: int, k: int, m: int) -> float:
    """Normalised defect of
    p_k p_m L_ij = [L_ik,[L_km,L_jm]] + p_j p_k L_im + p_i p_m L_jk - p_i p_j L_km."""

    def L(a, b):
        return ops[_pair(a, b)]

    lhs = p[k] * p[m] * L(i, j)
    terms = [commutator(L(i, k), commutator(L(k, m), L(j, m))),
             p[j] * p[k] * L(i, m), p[i] * p[m] * L(j, k), -p[i] * p[j] * L(k, m)]
    return _relative(lhs - sum(terms), [lhs] + terms)


def check_cubic_relation(params: ModelParams, grid: LatticeGrid, ops=None, seed=0,
                         tol: Tolerances | None = None) -> Check:
    """Cubic relation over ordered 4-tuples of distinct indices."""
    tol = tol or Tolerances()
    d = grid.d
    ctx = {"d": d, "N": grid.N}
    if d < 3:
        return _vacuous("cubic_relation", tol.operator, ctx, "needs d >= 3")
    ops = _ops_for(params, grid, ops)
    p = np.asarray(params.p)
    fam, sampled = _sample(list(itertools.permutations(range(d + 1), 4)), d, _rng(seed, 4))
    worst = max(cubic_residual(ops, p, *tup) for tup in fam)
    return _check("cubic_relation", worst, tol.operator,
                  {**ctx, "tuples": len(fam), "sampled": sampled})


def bracket_terms(ops: dict, p, a: int, b: int, c: int, e: int) -> list:
    """The four terms of p_a[L_bc,L_ce] - p_b[L_ac,L_ce] + p_c[L_ab,L_be] - p_e[L_ab,L_bc]."""

    def L(u, v):
        return ops[_pair(u, v)]

    return [p[a] * commutator(L(b, c), L(c, e)), -p[b] * commutator(L(a, c), L(c, e)),
            p[c] * commutator(L(a, b), L(b, e)), -p[e] * commutator(L(a, b), L(b, c))]


def check_bracket_dependency(params: ModelParams, grid: LatticeGrid, ops=None, seed=0,
                             coeffs=None, tol: Tolerances | None = None) -> Check:
    """Four-term linear relation among brackets, over ordered 4-tuples of indices.

    ``coeffs`` replaces p in the combination (for sensitivity probes).
    """
    tol = tol or Tolerances()
    d = grid.d
    ctx = {"d": d, "N": grid.N}
    if d < 3:
        return _vacuous("bracket_dependency", tol.operator, ctx, "needs d >= 3")
    ops = _ops_for(params, grid, ops)
    p = np.asarray(params.p if coeffs is None else coeffs, dtype=float)
    fam, sampled = _sample(list(itertools.permutations(range(d + 1), 4)), d, _rng(seed, 5))
    worst = 0.0
    for tup in fam:
        terms = bracket_terms(ops, p, *tup)
        worst = max(worst, _relative(sum(terms), terms))
    return _check("bracket_dependency", worst, tol.operator,
                  {**ctx, "tuples": len(fam), "sampled": sampled})


def expected_hamiltonian_spectrum(d: int, N: int) -> np.ndarray:
    """-k with multiplicity binom(k+d-1, d-1), ascending."""
    vals = [-k for k in range(N + 1) for _ in range(math.comb(k + d - 1, d - 1))]
    return np.sort(np.array(vals, dtype=float))


def check_hamiltonian_spectrum(params: ModelParams, grid: LatticeGrid, ops=None, weights=None,
                               tol: Tolerances | None = None) -> Check:
    tol = tol or Tolerances()
    H = build_hamiltonian(params, grid, ops=_ops_for(params, grid, ops))
    w = weight_vector(params, grid) if weights is None else weights
    ev = np.sort(weighted_spectrum(H, w))
    res = float(np.max(np.abs(ev - expected_hamiltonian_spectrum(grid.d, grid.N))))
    return _check("hamiltonian_spectrum", res, tol.spectrum, {"d": grid.d, "N": grid.N})


# ---------------------------------------------------------------------------
# Krawtchouk identities

def pointwise_residual(lhs, rhs, scale) -> float:
    """max |lhs - rhs| / scale over entries with nonzero scale."""
    diff = np.abs(np.asarray(lhs) - np.asarray(rhs))
    scale = np.asarray(scale)
    live = scale > 0
    if np.any(diff[~live] > 0):
        return math.inf
    return float(np.max(diff[live] / scale[live])) if np.any(live) else 0.0


def bispectral_residuals(kappa: KrawtchoukParam, N, grid: LatticeGrid, values=None,
                         limit: int | None = None) -> tuple[float, float]:
    """Worst pointwise residuals of the x-side and n-side eigen-equations.

    Each entry is judged against the magnitude of the hypergeometric terms
    feeding it (see ``magnitude_table``), pushed through the operator.
    ``limit`` restricts the comparison to |n|, |x| <= limit (truncated grids,
    whose outer shell sees incomplete operators).
    """
    T = basis_table(kappa, N, grid).values if values is None else values
    S = magnitude_table(kappa, N, grid)
    keep = np.ones(grid.size, dtype=bool) if limit is None else grid.degrees <= limit
    sub = np.ix_(keep, keep)
    ops_x = build_all_L(kappa.p, grid, N)
    ops_n = build_all_L(kappa.p_tilde, grid, N)
    res_x = res_n = 0.0
    for i in range(1, kappa.d + 1):
        B = bispectral_x_operator(kappa, i, grid, N, ops_x)
        lhs = np.asarray((B @ T.T).T)
        ni = grid.points[:, i - 1][:, None] * T
        scale = np.asarray((abs(B) @ S.T).T) + grid.points[:, i - 1][:, None] * S
        res_x = max(res_x, pointwise_residual(lhs[sub], ni[sub], scale[sub]))
        C = bispectral_n_operator(kappa, i, grid, N, ops_n)
        lhs = np.asarray(C @ T)
        xi = T * grid.points[:, i - 1][None, :]
        scale = np.asarray(abs(C) @ S) + S * grid.points[:, i - 1][None, :]
        res_n = max(res_n, pointwise_residual(lhs[sub], xi[sub], scale[sub]))
    return res_x, res_n


def orthogonality_residual(table, weights, norms) -> float:
    """max |<P_n, P_m> - delta_nm h_n| / sqrt(h_n h_m)."""
    G = gram_matrix(table, weights)
    norms = np.asarray(norms)
    scale = np.sqrt(np.abs(np.outer(norms, norms)))
    return float(np.max(np.abs(G - np.diag(norms)) / scale))


def duality_residual(kappa: KrawtchoukParam, N, grid: LatticeGrid, values=None) -> float:
    T = basis_table(kappa, N, grid).values if values is None else values
    Td = basis_table(involution(kappa), N, grid).values
    return float(np.max(np.abs(T.T - Td)) / max(1.0, np.max(np.abs(T))))


# ---------------------------------------------------------------------------
# Gaudin model

def _coordinate_zetas(d: int):
    return [np.eye(d + 1)[k] for k in range(d + 1)]


def check_gaudin_diagonalization(model: GaudinModel, N: int, grid: LatticeGrid | None = None,
                                 values=None, tol: Tolerances | None = None) -> list:
    """Spectral equations in x and in n for zeta over the coordinate basis,
    plus pairwise commutators of the d+1 Gaudin operators."""
    tol = tol or Tolerances()
    grid = LatticeGrid(model.d, N) if grid is None else grid
    kappa = model.kappa
    T = basis_table(kappa, N, grid).values if values is None else values
    normT = float(np.linalg.norm(T))
    ops = build_all_L(model.p, grid)
    dual_ops = build_all_L(kappa.p_tilde, grid)
    res_x = res_n = 0.0
    gs = []
    for zeta in _coordinate_zetas(model.d):
        G = build_gaudin(model.alpha, zeta, model.p, grid, ops=ops)
        gs.append(G)
        mus = np.array([eigenvalue_mu(n, model, zeta) for n in grid])
        scale = fro(G) * normT
        if scale > 0:
            res_x = max(res_x, float(np.linalg.norm((G @ T.T).T - mus[:, None] * T)) / scale)
        Gd = build_dual_gaudin(model.beta, zeta, kappa, grid, ops=dual_ops)
        mus_d = np.array([dual_eigenvalue_mu(x, model, zeta) for x in grid])
        scale = fro(Gd) * normT
        if scale > 0:
            res_n = max(res_n, float(np.linalg.norm(Gd @ T - T * mus_d[None, :])) / scale)
    comm = max((commutator_residual(a, b) for a, b in itertools.combinations(gs, 2)),
               default=0.0)
    ctx = {"d": model.d, "N": N}
    return [_check("gaudin_spectral_x", res_x, tol.operator, ctx),
            _check("gaudin_spectral_n", res_n, tol.operator, ctx),
            _check("gaudin_elements_commute", comm, tol.operator, ctx)]


def check_eigenvalue_agreement(model: GaudinModel, grid: LatticeGrid, seed=0, samples: int = 20,
                               tol: Tolerances | None = None) -> Check:
    """Eigenvalue from the kappa form against the closed form in beta, on
    random (n, zeta), relative to the magnitude of the summands."""
    tol = tol or Tolerances()
    rng = _rng(seed, 6)
    a, b, p = model.alpha, model.beta, model.p
    M = b[None, 1:] / (1.0 + np.outer(a[1:], b[1:]))
    worst = 0.0
    for _ in range(samples):
        n = grid.points[rng.integers(grid.size)]
        zeta = rng.standard_normal(model.d + 1)
        lam = eigenvalue_lambda(n, model.kappa, a, zeta)
        m = eigenvalue_mu(n, model, zeta)
        scale = float(np.abs((zeta[1:] - zeta[0]) * p[1:]) @ np.abs(M) @ n)
        if scale > 0:
            worst = max(worst, abs(lam - m) / scale)
    return _check("eigenvalue_agreement", worst, tol.eigen_agreement,
                  {"d": model.d, "samples": samples})


def root_residual(model: GaudinModel) -> float:
    coeffs = poly_R(model.p, model.alpha)
    return max(abs(np.polynomial.polynomial.polyval(b, coeffs)) / poly_eval_scale(coeffs, b)
               for b in model.beta[1:])


def involution_consistency_residual(model: GaudinModel) -> float:
    """Solving with (p~, beta) must give the involuted kappa up to the order of columns."""
    dual = solve(model.p_tilde, model.beta)
    # dual roots come back sorted; match them to alpha_1..alpha_d
    order = np.argsort(model.alpha[1:], kind="stable") + 1
    perm = np.concatenate([[0], order])
    U_expected = model.kappa.U.T[:, perm]
    res_u = np.max(np.abs(dual.kappa.U - U_expected) / np.maximum(1.0, np.abs(U_expected)))
    res_p = np.max(np.abs(dual.kappa.p_tilde - model.p[perm]) / model.p[perm])
    res_a = np.max(np.abs(dual.beta - model.alpha[perm]) / np.maximum(1.0, np.abs(model.alpha[perm])))
    return float(max(res_u, res_p, res_a))


# ---------------------------------------------------------------------------
# suite

MANIFEST = {
    "lattice_normalization": "operator",
    "kd_disjoint_commute": "operator",
    "kd_triangle": "operator",
    "hamiltonian_central": "operator",
    "jucys_murphy_commute": "operator",
    "self_adjointness": "self_adjoint",
    "degree_preservation": "degree",
    "linear_independence": "condition",
    "cubic_relation": "operator",
    "bracket_dependency": "operator",
    "kappa_validity": "operator",
    "dual_gram_identity": "operator",
    "bispectral_x": "hypergeometric",
    "bispectral_n": "hypergeometric",
    "orthogonality": "hypergeometric",
    "duality": "duality",
    "gaudin_roots": "root",
    "gaudin_kappa_validity": "operator",
    "diag_condition_a": "operator",
    "diag_condition_b": "operator",
    "cocycle": "operator",
    "gaudin_spectral_x": "operator",
    "gaudin_spectral_n": "operator",
    "gaudin_elements_commute": "operator",
    "eigenvalue_agreement": "eigen_agreement",
    "dual_R_identity": "operator",
    "involution_consistency": "operator",
    "hamiltonian_spectrum": "spectrum",
}

NEGATIVE_MANIFEST = {
    "neg_weight_normalization": "truncated",
    "neg_kappa_validity": "operator",
    "neg_bispectral_x": "hypergeometric",
    "neg_bispectral_n": "hypergeometric",
    "neg_orthogonality": "truncated",
}

# structural failures that become failed entries instead of aborting the suite
_RECORDED = (KDError, ValueError, ArithmeticError, np.linalg.LinAlgError)


@dataclass
class SuiteConfig:
    p: tuple | None
    alpha: tuple | None
    N: int | None
    seed: int = 0
    mode: str = "multinomial"
    c: tuple | None = None
    s: float | None = None
    tolerances: Tolerances = field(default_factory=Tolerances.from_env)
    model: GaudinModel | None = None
    condition_kappa: KrawtchoukParam | None = None
    eigen_samples: int = 20
    neg_radius: int = 40
    neg_pointwise_radius: int = 6
    neg_orth_degree: int = 2

    def echo(self) -> dict:
        out = {"mode": self.mode, "seed": self.seed}
        if self.mode == "multinomial":
            out.update(p=list(map(float, self.p)), alpha=list(map(float, self.alpha)), N=self.N)
        else:
            out.update(c=list(map(float, self.c)), s=float(self.s), radius=self.neg_radius,
                       pointwise_radius=self.neg_pointwise_radius,
                       orthogonality_degree=self.neg_orth_degree)
        return out


class _Multinomial:
    """Lazily built shared objects for one suite run."""

    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self.tol = cfg.tolerances

    @cached_property
    def params(self):
        return ModelParams.multinomial(self.cfg.p, self.cfg.N)

    @cached_property
    def grid(self):
        return LatticeGrid(self.params.d, self.params.N)

    @cached_property
    def weights(self):
        return weight_vector(self.params, self.grid)

    @cached_property
    def ops(self):
        return build_all_L(self.params, self.grid)

    @cached_property
    def kappa(self):
        return random_kappa(self.params.p, seed=self.cfg.seed)

    @cached_property
    def table(self):
        return basis_table(self.kappa, self.params.N, self.grid)

    @cached_property
    def model(self):
        if self.cfg.model is not None:
            return self.cfg.model
        return solve(self.params.p, self.cfg.alpha)

    @cached_property
    def model_table(self):
        return basis_table(self.model.kappa, self.params.N, self.grid)

    @property
    def ctx(self):
        return {"d": self.params.d, "N": self.params.N}

    def blocks(self):
        t, s = self.tol, self.cfg.seed
        yield ("lattice_normalization",), lambda: [_check(
            "lattice_normalization", abs(math.fsum(self.weights.tolist()) - 1.0), t.operator,
            self.ctx)]
        yield ("kd_disjoint_commute", "kd_triangle"), lambda: check_kd_relations(
            self.params, self.grid, self.ops, s, t)
        yield ("hamiltonian_central", "jucys_murphy_commute"), lambda: (
            check_central_and_jucys_murphy(self.params, self.grid, self.ops, s, t))
        yield ("self_adjointness",), lambda: [check_self_adjointness(
            self.params, self.grid, self.ops, self.weights, t)]
        yield ("degree_preservation",), lambda: [check_degree_preservation(
            self.params, self.grid, self.ops, t)]
        yield ("linear_independence",), lambda: [check_linear_independence(
            self.params, self.grid, self.ops, t)]
        yield ("cubic_relation",), lambda: [check_cubic_relation(
            self.params, self.grid, self.ops, s, t)]
        yield ("bracket_dependency",), lambda: [check_bracket_dependency(
            self.params, self.grid, self.ops, s, tol=t)]
        yield ("kappa_validity",), lambda: [_check(
            "kappa_validity", validate(self.kappa).worst, t.operator, {"seed": s})]
        yield ("dual_gram_identity",), lambda: [_check(
            "dual_gram_identity", dual_gram_residual(self.kappa), t.operator, {"seed": s})]
        yield ("bispectral_x", "bispectral_n"), self._bispectral
        yield ("orthogonality",), lambda: [_check(
            "orthogonality",
            orthogonality_residual(self.table, self.weights,
                                   norm_vector(self.kappa, self.params.N, self.grid)),
            t.hypergeometric, self.ctx)]
        yield ("duality",), lambda: [_check(
            "duality", duality_residual(self.kappa, self.params.N, self.grid, self.table.values),
            t.duality, self.ctx)]
        yield ("gaudin_roots",), lambda: [_check(
            "gaudin_roots", root_residual(self.model), t.root,
            {"solver": self.model.solver.get("path")})]
        yield ("gaudin_kappa_validity",), lambda: [_check(
            "gaudin_kappa_validity", validate(self.model.kappa).worst, t.operator)]
        yield ("diag_condition_a", "diag_condition_b"), self._diag_conditions
        yield ("cocycle",), lambda: [_check("cocycle", cocycle_residual(self.model), t.operator)]
        yield ("gaudin_spectral_x", "gaudin_spectral_n", "gaudin_elements_commute"), lambda: (
            check_gaudin_diagonalization(self.model, self.params.N, self.grid,
                                         self.model_table.values, t))
        yield ("eigenvalue_agreement",), lambda: [check_eigenvalue_agreement(
            self.model, self.grid, s, self.cfg.eigen_samples, t)]
        yield ("dual_R_identity",), self._dual_R
        yield ("involution_consistency",), lambda: [_check(
            "involution_consistency", involution_consistency_residual(self.model), t.operator)]
        yield ("hamiltonian_spectrum",), lambda: [check_hamiltonian_spectrum(
            self.params, self.grid, self.ops, self.weights, t)]

    def _bispectral(self):
        rx, rn = bispectral_residuals(self.kappa, self.params.N, self.grid, self.table.values)
        t = self.tol.hypergeometric
        return [_check("bispectral_x", rx, t, self.ctx), _check("bispectral_n", rn, t, self.ctx)]

    def _diag_conditions(self):
        routed = self.cfg.condition_kappa
        kappa = self.model.kappa if routed is None else routed
        rep = check_prop32(kappa, self.model.alpha)
        note = "" if routed is None else "kappa supplied by caller"
        ctx = {"d": kappa.d}
        b = (_vacuous("diag_condition_b", self.tol.operator, ctx, "needs d >= 3") if rep.vacuous_b
             else _check("diag_condition_b", rep.residual_b, self.tol.operator, ctx, note))
        return [_check("diag_condition_a", rep.residual_a, self.tol.operator, ctx, note), b]

    def _dual_R(self):
        rep = dual_R_residual(self.model)
        return [_check("dual_R_identity", max(rep.coefficient_residual, rep.root_residual),
                       self.tol.operator,
                       {"coefficient": rep.coefficient_residual, "roots": rep.root_residual})]


class _Negative:
    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self.tol = cfg.tolerances

    @cached_property
    def params(self):
        return ModelParams.negative(self.cfg.c, self.cfg.s)

    @cached_property
    def kappa(self):
        return random_kappa(self.params.p, seed=self.cfg.seed, allow_nonpositive=True)

    def blocks(self):
        t, cfg = self.tol, self.cfg
        yield ("neg_weight_normalization",), self._normalization
        yield ("neg_kappa_validity",), lambda: [_check(
            "neg_kappa_validity", validate(self.kappa).worst, t.operator, {"seed": cfg.seed})]
        yield ("neg_bispectral_x", "neg_bispectral_n"), self._bispectral
        yield ("neg_orthogonality",), self._orthogonality

    def _normalization(self):
        grid = LatticeGrid(self.params.d, self.cfg.neg_radius)
        total = math.fsum(weight_vector(self.params, grid).tolist())
        return [_check("neg_weight_normalization", abs(total - 1.0), self.tol.truncated,
                       {"radius": grid.N})]

    def _bispectral(self):
        limit = self.cfg.neg_pointwise_radius
        # one extra shell so that every compared row sees complete operators
        grid = LatticeGrid(self.params.d, limit + 1)
        rx, rn = bispectral_residuals(self.kappa, self.params.N, grid, limit=limit)
        ctx = {"radius": limit}
        t = self.tol.hypergeometric
        return [_check("neg_bispectral_x", rx, t, ctx), _check("neg_bispectral_n", rn, t, ctx)]

    def _orthogonality(self):
        d = self.params.d
        x_grid = LatticeGrid(d, self.cfg.neg_radius)
        n_grid = LatticeGrid(d, self.cfg.neg_orth_degree)
        table = basis_table(self.kappa, self.params.N, n_grid, x_grid)
        w = weight_vector(self.params, x_grid)
        res = orthogonality_residual(table, w, norm_vector(self.kappa, self.params.N, n_grid))
        return [_check("neg_orthogonality", res, self.tol.truncated,
                       {"radius": x_grid.N, "max_degree": n_grid.N})]


def run_suite(cfg: SuiteConfig) -> VerificationReport:
    if cfg.mode == "multinomial":
        runner, manifest = _Multinomial(cfg), MANIFEST
    elif cfg.mode in ("negative", "negative-multinomial"):
        runner, manifest = _Negative(cfg), NEGATIVE_MANIFEST
    else:
        raise ValueError(f"unknown mode {cfg.mode!r}")
    tol = cfg.tolerances
    checks = []
    for names, fn in runner.blocks():
        try:
            produced = fn()
        except _RECORDED as exc:
            note = f"error: {type(exc).__name__}: {exc}"
            produced = [Check(n, math.inf, getattr(tol, manifest[n]), False, {}, note)
                        for n in names]
        checks.extend(produced)
    checks.append(_audit(checks, manifest))
    meta = {"version": __version__, "seed": cfg.seed, "inputs": cfg.echo(),
            "tolerances": asdict(tol)}
    return VerificationReport(checks, meta)


def _audit(checks, manifest) -> Check:
    """Every manifest entry exactly once, in manifest order, nothing extra."""
    names = [c.name for c in checks]
    expected = list(manifest)
    missing = [n for n in expected if n not in names]
    extra = [n for n in names if n not in manifest]
    dupes = sorted({n for n in names if names.count(n) > 1})
    defects = len(missing) + len(extra) + len(dupes) + (0 if names == expected else 1)
    note = "; ".join(f"{label}: {', '.join(v)}" for label, v in
                     (("missing", missing), ("unexpected", extra), ("duplicated", dupes)) if v)
    return _check("manifest_audit", defects, 0.0, {"expected": len(expected)}, note)


def full_suite(p=None, alpha=None, N=None, seed=0, mode="multinomial", c=None, s=None,
               tolerances: Tolerances | None = None, model: GaudinModel | None = None,
               **options) -> VerificationReport:
    """Run every check for one parameter set.

    Multinomial mode needs ``p``, ``alpha`` and ``N`` (or a solved ``model``
    in place of ``alpha``); negative mode needs ``c`` and ``s``.  Individual
    failures, including solver errors, are recorded and never raised.
    """
    if model is not None:
        p = model.p.tolist() if p is None else p
        alpha = model.alpha.tolist() if alpha is None else alpha
    cfg = SuiteConfig(
        p=None if p is None else tuple(float(v) for v in p),
        alpha=None if alpha is None else tuple(float(v) for v in alpha),
        N=N, seed=seed, mode=mode, c=c, s=s,
        tolerances=Tolerances.from_env() if tolerances is None else tolerances,
        model=model, **options,
    )
    return run_suite(cfg)
