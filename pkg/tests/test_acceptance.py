"""Acceptance criteria 1-14, one PASS/FAIL line each.

    pytest tests/test_acceptance.py -s      (or)      python tests/test_acceptance.py
"""
import itertools
import json
import math
import subprocess
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

sys.path.insert(0, str(Path(__file__).parent))

from conftest import dirichlet_p, random_alpha  # noqa: E402
from kdgaudin.gaudin import (  # noqa: E402
    check_prop32,
    dual_R_residual,
    eigenvalue_lambda,
    eigenvalue_mu,
    poly_eval_scale,
    poly_R,
    prop32_value,
    solve,
)
from kdgaudin.kappa import complete_from_U, involution, random_kappa  # noqa: E402
from kdgaudin.krawtchouk import basis_table, gram_matrix, norm_vector  # noqa: E402
from kdgaudin.lattice import LatticeGrid, ModelParams, weight_vector  # noqa: E402
from kdgaudin.operators import build_all_L, build_L, symmetrized_residual, weighted_spectrum  # noqa: E402
from kdgaudin.verify import (  # noqa: E402
    bispectral_residuals,
    check_bracket_dependency,
    check_cubic_relation,
    check_degree_preservation,
    check_gaudin_diagonalization,
    check_hamiltonian_spectrum,
    check_kd_relations,
    check_linear_independence,
    full_suite,
    orthogonality_residual,
)

CRITERIA = {}


def criterion(number, title):
    def wrap(fn):
        CRITERIA[number] = (title, fn)
        return fn
    return wrap


def _rng(k):
    return np.random.default_rng(1000 + k)


@criterion(1, "Kohno-Drinfeld relations")
def c01():
    rng, worst, start = _rng(1), 0.0, time.perf_counter()
    for d, N in itertools.product((2, 3, 4), (3, 5)):
        for _ in range(20):
            params = ModelParams.multinomial(dirichlet_p(rng, d), N)
            grid = LatticeGrid(d, N)
            for c in check_kd_relations(params, grid):
                worst = max(worst, c.residual)
    elapsed = time.perf_counter() - start
    return worst <= 1e-10 and elapsed <= 60, f"max residual {worst:.2e}, {elapsed:.1f}s"


@criterion(2, "self-adjointness and degree preservation")
def c02():
    rng, sa, deg = _rng(2), 0.0, 0.0
    for d, N in itertools.product((1, 2, 3, 4), (1, 3, 5)):
        for _ in range(3):
            params = ModelParams.multinomial(dirichlet_p(rng, d), N)
            grid = LatticeGrid(d, N)
            ops = build_all_L(params, grid)
            w = weight_vector(params, grid)
            sa = max(sa, max(symmetrized_residual(L, w) for L in ops.values()))
            deg = max(deg, check_degree_preservation(params, grid, ops).residual)
    return sa <= 1e-12 and deg <= 1e-9, f"self-adjoint {sa:.2e}, degree fit {deg:.2e}"


@criterion(3, "Hamiltonian spectrum on d=2, N=4")
def c03():
    rng, worst, mult_ok = _rng(3), 0.0, True
    for p in [[1 / 3] * 3] + [dirichlet_p(rng, 2) for _ in range(5)]:
        params = ModelParams.multinomial(p, 4)
        grid = LatticeGrid(2, 4)
        worst = max(worst, check_hamiltonian_spectrum(params, grid).residual)
        from kdgaudin.operators import build_hamiltonian
        ev = weighted_spectrum(build_hamiltonian(params, grid), weight_vector(params, grid))
        counts = [int(np.sum(np.abs(ev + k) <= 1e-8)) for k in range(5)]
        mult_ok &= counts == [1, 2, 3, 4, 5]
    return worst <= 1e-8 and mult_ok, f"max eigenvalue error {worst:.2e}, multiplicities ok={mult_ok}"


@criterion(4, "orthogonality for random kappa")
def c04():
    worst = 0.0
    for d, N, seed in itertools.product((1, 2, 3), range(1, 7), range(3)):
        rng = np.random.default_rng([d, N, seed])
        p = dirichlet_p(rng, d)
        kappa = random_kappa(p, seed=seed)
        params = ModelParams.multinomial(p, N)
        grid = LatticeGrid(d, N)
        res = orthogonality_residual(basis_table(kappa, N, grid), weight_vector(params, grid),
                                     norm_vector(kappa, N, grid))
        worst = max(worst, res)
    return worst <= 1e-9, f"max relative Gram error {worst:.2e}"


@criterion(5, "bispectrality for random kappa")
def c05():
    worst = 0.0
    for d, N, seed in itertools.product((1, 2, 3), range(1, 6), range(3)):
        rng = np.random.default_rng([d, N, seed, 5])
        kappa = random_kappa(dirichlet_p(rng, d), seed=seed)
        worst = max(worst, *bispectral_residuals(kappa, N, LatticeGrid(d, N)))
    return worst <= 1e-9, f"max pointwise residual {worst:.2e}"


@criterion(6, "Gaudin diagonalisation, 50 instances per d = 1..8")
def c06():
    rng = _rng(6)
    fallbacks, roots, spectral, comm = 0, 0.0, 0.0, 0.0
    for d in range(1, 9):
        N = 3 if d <= 4 else 2
        grid = LatticeGrid(d, N)
        for _ in range(50):
            m = solve(dirichlet_p(rng, d), random_alpha(rng, d))
            fallbacks += m.solver["path"] != "bisection"
            coeffs = poly_R(m.p, m.alpha)
            roots = max(roots, max(abs(npoly.polyval(b, coeffs)) / poly_eval_scale(coeffs, b)
                                   for b in m.beta[1:]))
            sx, sn, cm = check_gaudin_diagonalization(m, N, grid)
            spectral = max(spectral, sx.residual, sn.residual)
            comm = max(comm, cm.residual)
    ok = fallbacks == 0 and roots <= 1e-12 and spectral <= 1e-10 and comm <= 1e-10
    return ok, (f"fallbacks {fallbacks}, root {roots:.2e}, spectral {spectral:.2e}, "
                f"commutators {comm:.2e}")


@criterion(7, "diagonalisability conditions and eigenvalue formulas")
def c07():
    rng = _rng(7)
    cond, agree = 0.0, 0.0
    for d in range(1, 9):
        for _ in range(20):
            m = solve(dirichlet_p(rng, d), random_alpha(rng, d))
            cond = max(cond, check_prop32(m.kappa, m.alpha).worst)
            for _ in range(5):
                n = rng.integers(0, 5, d)
                zeta = rng.standard_normal(d + 1)
                lam = eigenvalue_lambda(n, m.kappa, m.alpha, zeta)
                mu = eigenvalue_mu(n, m, zeta)
                if lam != mu:
                    agree = max(agree, abs(lam - mu) / abs(mu))
    alpha = np.array([0.0, 1.0, -0.5, 2.0])
    generic = min(check_prop32(random_kappa(dirichlet_p(rng, 3), seed=s), alpha).residual_a
                  for s in range(50))
    ok = cond <= 1e-10 and agree <= 1e-12 and generic > 1e-3
    return ok, (f"conditions {cond:.2e}, eigenvalue agreement {agree:.2e}, "
                f"smallest generic violation {generic:.2e}")


@criterion(8, "worked symmetric case")
def c08():
    m = solve([1 / 3] * 3, [0.0, 1.0, -1.0])
    beta_err = float(np.max(np.abs(m.beta[1:] - [-math.sqrt(3), math.sqrt(3)])))
    pt_err = float(np.max(np.abs(m.p_tilde - 1 / 3)))
    vals = (float(prop32_value(m.kappa, 1, 2)), float(prop32_value(m.kappa, 2, 1)))
    ok = beta_err <= 1e-12 and pt_err <= 1e-12 and vals == (0.5, 0.5)
    return ok, f"beta error {beta_err:.1e}, p~ error {pt_err:.1e}, values {vals}"


def _hyp2f1(a, b, c, z):
    total, term = Fraction(0), Fraction(1)
    for k in range(min(-a, -b) + 1):
        total += term
        if k < min(-a, -b):
            term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
    return total


@criterion(9, "d=1 reduction")
def c09():
    worst_beta = worst_u = worst_ev = worst_f = 0.0
    for p1, a1 in [(Fraction(3, 4), 1.0), (Fraction(1, 2), -2.0), (Fraction(3, 5), 0.3)]:
        p = [1 - p1, p1]
        pf = [float(v) for v in p]
        m = solve(pf, [0.0, a1])
        worst_beta = max(worst_beta, abs(m.beta[1] * pf[0] * a1 + 1))
        worst_u = max(worst_u, abs(m.kappa.U[1, 1] + pf[0] / pf[1]) / (pf[0] / pf[1]))
        for N in range(1, 7):
            grid = LatticeGrid(1, N)
            params = ModelParams.multinomial(pf, N)
            ev = np.sort(weighted_spectrum(-build_L(0, 1, pf, grid), weight_vector(params, grid)))
            worst_ev = max(worst_ev, float(np.max(np.abs(ev - np.arange(N + 1)))))
            T = basis_table(m.kappa, N, grid).values
            for n, x in itertools.product(range(N + 1), repeat=2):
                want = float(_hyp2f1(-n, -x, -N, 1 / p1))
                worst_f = max(worst_f, abs(T[n, x] - want) / max(1.0, abs(want)))
    ok = worst_beta <= 1e-14 and worst_u <= 1e-14 and worst_ev <= 1e-10 and worst_f <= 1e-12
    return ok, (f"beta {worst_beta:.1e}, u11 {worst_u:.1e}, spectrum {worst_ev:.1e}, "
                f"2F1 {worst_f:.1e}")


@criterion(10, "duality under the involution")
def c10():
    worst, idem = 0.0, True
    for d, N, seed in itertools.product((1, 2, 3), range(1, 7), range(2)):
        rng = np.random.default_rng([d, N, seed, 10])
        kappa = random_kappa(dirichlet_p(rng, d), seed=seed)
        grid = LatticeGrid(d, N)
        T = basis_table(kappa, N, grid).values
        Td = basis_table(involution(kappa), N, grid).values
        worst = max(worst, float(np.max(np.abs(T.T - Td)) / max(1.0, np.max(np.abs(T)))))
        idem &= involution(involution(kappa)) == kappa
    return worst <= 1e-12 and idem, f"max entry deviation {worst:.2e}, idempotent={idem}"


@criterion(11, "cubic relation, bracket dependency, linear independence")
def c11():
    rng = _rng(11)
    cubic = bracket = 0.0
    for _ in range(5):
        params = ModelParams.multinomial(dirichlet_p(rng, 3), 3)
        grid = LatticeGrid(3, 3)
        ops = build_all_L(params, grid)
        cubic = max(cubic, check_cubic_relation(params, grid, ops).residual)
        bracket = max(bracket, check_bracket_dependency(params, grid, ops).residual)
    ratio = 1.0
    for d, N in itertools.product((1, 2, 3, 4), (1, 2, 3)):
        params = ModelParams.multinomial(dirichlet_p(rng, d), N)
        c = check_linear_independence(params, LatticeGrid(d, N))
        ratio = min(ratio, c.context["sv_ratio"])
    ok = cubic <= 1e-10 and bracket <= 1e-10 and ratio >= 1e-8
    return ok, f"cubic {cubic:.2e}, bracket {bracket:.2e}, min singular-value ratio {ratio:.2e}"


@criterion(12, "dual polynomial identity")
def c12():
    rng, coef, root = _rng(12), 0.0, 0.0
    for d in range(1, 9):
        for _ in range(20):
            rep = dual_R_residual(solve(dirichlet_p(rng, d), random_alpha(rng, d)))
            coef = max(coef, rep.coefficient_residual)
            root = max(root, rep.root_residual)
    return coef <= 1e-10 and root <= 1e-10, f"coefficients {coef:.2e}, at alpha_k {root:.2e}"


@criterion(13, "negative multinomial regime")
def c13():
    params = ModelParams.negative([0.25, 0.25], 2)
    bis = orth = 0.0
    for seed in range(5):
        kappa = random_kappa(params.p, seed=seed, allow_nonpositive=True)
        bis = max(bis, *bispectral_residuals(kappa, params.N, LatticeGrid(2, 7), limit=6))
        x_grid, n_grid = LatticeGrid(2, 40), LatticeGrid(2, 2)
        table = basis_table(kappa, params.N, n_grid, x_grid)
        orth = max(orth, orthogonality_residual(table, weight_vector(params, x_grid),
                                                norm_vector(kappa, params.N, n_grid)))
    return bis <= 1e-9 and orth <= 1e-6, (f"pointwise bispectral {bis:.2e}, "
                                          f"truncated orthogonality {orth:.2e} (|n| <= 2)")


def _cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "kdgaudin.cli", *args],
                          capture_output=True, text=True, env=env)


@criterion(14, "CLI round trip and exit codes")
def c14():
    with tempfile.TemporaryDirectory() as tmp:
        model = str(Path(tmp) / "model.json")
        solved = _cli("solve", "--p", "1/3,1/3,1/3", "--alpha", "1,-1", "--out", model)
        verified = _cli("verify", "--model", model, "--N", "4", "--seed", "7")
        cli = {c["name"]: c["residual"] for c in json.loads(verified.stdout)["checks"]}
        local = full_suite([1 / 3] * 3, [0.0, 1.0, -1.0], 4, seed=7).residuals()
        identical = cli == local
        codes = {
            "solve": solved.returncode,
            "pass": verified.returncode,
            "fail": _cli("verify", "--model", model, "--N", "4", "--tol", "operator=1e-30").returncode,
            "usage": _cli("solve", "--p", "1/2,1/2").returncode,
            "error": _cli("solve", "--p", "1/5,3/10,1/2", "--alpha", "1,1").returncode,
        }
    expected = {"solve": 0, "pass": 0, "fail": 1, "usage": 64, "error": 2}
    return identical and codes == expected, f"bit-identical={identical}, exit codes {codes}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number, capsys):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    with capsys.disabled():
        print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        title, fn = CRITERIA[number]
        ok, detail = fn()
        failed += not ok
        print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}", flush=True)
    sys.exit(1 if failed else 0)
