"""Full verification suite on one parameter set, printed as a table.

    python scripts/reference_run.py --p 1/4,1/4,1/2 --alpha 1,-1 --N 4
"""
import argparse
import sys

from kdgaudin.cli import parse_alpha, parse_p
from kdgaudin.verify import full_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="1/4,1/4,1/2")
    ap.add_argument("--alpha", default="1,-1")
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the report JSON here")
    args = ap.parse_args()

    p = parse_p(args.p)
    report = full_suite(p, parse_alpha(args.alpha, len(p) - 1), args.N, seed=args.seed)
    print(report.to_text())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json(indent=2) + "\n")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
