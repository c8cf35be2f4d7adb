"""Truncated orthogonality in the negative multinomial regime.

The weight has infinite support, so the Gram matrix is summed over balls of
growing radius.  The relative error should decay with the radius at a rate
set by |c|.
"""
import argparse

import numpy as np

from kdgaudin.kappa import random_kappa
from kdgaudin.krawtchouk import basis_table, norm_vector
from kdgaudin.lattice import LatticeGrid, ModelParams, weight_vector
from kdgaudin.verify import orthogonality_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", default="0.2,0.3")
    ap.add_argument("--s", type=float, default=2.5)
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--radii", default="10,20,40,80,120")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    c = [float(v) for v in args.c.split(",")]
    params = ModelParams.negative(c, args.s)
    kappa = random_kappa(params.p, seed=args.seed, allow_nonpositive=True)
    n_grid = LatticeGrid(params.d, args.degree)
    norms = norm_vector(kappa, params.N, n_grid)
    print(f"formal p = {np.round(params.p, 6).tolist()}, N = {params.N}")
    print(f"{'radius':>7} {'points':>8} {'relative Gram error':>20}")
    for r in (int(v) for v in args.radii.split(",")):
        x_grid = LatticeGrid(params.d, r)
        table = basis_table(kappa, params.N, n_grid, x_grid=x_grid)
        res = orthogonality_residual(table, weight_vector(params, x_grid), norms)
        print(f"{r:>7} {x_grid.size:>8} {res:>20.2e}")


if __name__ == "__main__":
    main()
