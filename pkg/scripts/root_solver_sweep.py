"""Sweep the Gaudin root solver over random (p, alpha) and report accuracy.

For each d the script solves many random instances and records the worst
scaled polynomial residual, the smallest distance from 1/beta to a pole and how often the
bisection path had to fall back to the companion matrix.
"""
import argparse
import time

import numpy as np
from numpy.polynomial import polynomial as npoly

from kdgaudin.gaudin import poly_eval_scale, poly_R, solve


def random_instance(rng, d, gap=0.05):
    p = rng.dirichlet(np.ones(d + 1))
    p[0] = 1.0 - p[1:].sum()
    while True:
        alpha = np.concatenate([[0.0], rng.uniform(-3, 3, d)])
        if np.min(np.diff(np.sort(alpha))) > gap:
            return p, alpha


def sweep(d, count, rng):
    worst, margin, fallbacks = 0.0, np.inf, 0
    start = time.perf_counter()
    for _ in range(count):
        p, alpha = random_instance(rng, d)
        m = solve(p, alpha)
        fallbacks += m.solver["path"] != "bisection"
        coeffs = poly_R(m.p, m.alpha)
        beta = m.beta[1:]
        worst = max(worst, max(abs(npoly.polyval(b, coeffs)) / poly_eval_scale(coeffs, b)
                               for b in beta))
        # z = 1/beta lies strictly between consecutive poles -alpha_j
        a = np.sort(-alpha)
        b = np.sort(1.0 / beta)
        margin = min(margin, float(np.min(np.minimum(b - a[:-1], a[1:] - b))))
    return worst, margin, fallbacks, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dmax", type=int, default=12)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'d':>3} {'max scaled residual':>20} {'min margin':>12} {'fallbacks':>9} {'time':>7}")
    for d in range(1, args.dmax + 1):
        worst, margin, fb, dt = sweep(d, args.count, rng)
        print(f"{d:>3} {worst:>20.2e} {margin:>12.2e} {fb:>9d} {dt:>6.2f}s")


if __name__ == "__main__":
    main()
