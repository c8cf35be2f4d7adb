"""Command line front end: ``kdgaudin {solve,eval,table,verify}``.

Exit codes: 0 success, 1 a verification check failed, 2 computation error,
64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import KDError
from .gaudin import GaudinModel, solve
from .kappa import KrawtchoukParam, involution
from .krawtchouk import basis_table, eval_poly, gram_matrix, norm_vector
from .lattice import LatticeGrid, ModelParams, weight_vector
from .verify import Tolerances, full_suite

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fractions(text: str) -> list:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {text!r} as a list of numbers: {exc}") from None


def _ints(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a list of integers") from None


@dataclass
class CliConfig:
    command: str
    p: list | None = None
    c: list | None = None
    s: float | None = None
    alpha: list | None = None
    N: float | None = None
    seed: int = 0
    mode: str = "multinomial"
    tolerances: Tolerances = field(default_factory=Tolerances)
    model_path: str | None = None
    kappa_path: str | None = None
    out: str | None = None
    fmt: str = "json"

    @property
    def d(self) -> int | None:
        if self.p is not None:
            return len(self.p) - 1
        if self.c is not None:
            return len(self.c)
        return None


def parse_p(text: str) -> list:
    """Exact parse of a probability vector; the sum must be exactly one."""
    fr = _fractions(text)
    if len(fr) < 2:
        raise UsageError("--p needs at least two entries")
    if sum(fr) != 1:
        raise UsageError(f"--p entries must sum to exactly 1, got {sum(fr)}")
    return [float(v) for v in fr]


def parse_alpha(text: str, d: int) -> list:
    """alpha_1..alpha_d, or alpha_0..alpha_d with alpha_0 = 0."""
    vals = [float(v) for v in _fractions(text)]
    if len(vals) == d:
        return [0.0] + vals
    if len(vals) == d + 1 and vals[0] == 0.0:
        return vals
    raise UsageError(f"--alpha needs {d} entries (alpha_0 = 0 is implied), got {len(vals)}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kdgaudin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve the Gaudin model for given p and alpha")
    sp.add_argument("--p", required=True, help="comma list, fractions allowed (1/3,1/3,1/3)")
    sp.add_argument("--alpha", required=True, help="alpha_1..alpha_d (use --alpha=-1,1 for a leading minus)")
    sp.add_argument("--method", default="auto", choices=["auto", "bisection", "companion"])
    sp.add_argument("--root-tol", type=float, default=1e-12)
    sp.add_argument("--out", help="write the model JSON here instead of stdout")

    ep = sub.add_parser("eval", help="evaluate one polynomial value P_n(x)")
    _add_kappa_source(ep)
    ep.add_argument("--N", type=float, required=True)
    ep.add_argument("--n", required=True)
    ep.add_argument("--x", required=True)

    tp = sub.add_parser("table", help="CSV table of P_n(x) on the full grid")
    _add_kappa_source(tp)
    tp.add_argument("--N", type=int, required=True)
    tp.add_argument("--gram", action="store_true", help="append Gram matrix and norm comparison")
    tp.add_argument("--involution", action="store_true", help="tabulate the involuted kappa")
    tp.add_argument("--method", default="factored", choices=["factored", "direct"])
    tp.add_argument("--out")

    vp = sub.add_parser("verify", help="run the full verification suite")
    vp.add_argument("--p")
    vp.add_argument("--alpha")
    vp.add_argument("--model", help="GaudinModel JSON from `solve`")
    vp.add_argument("--N", type=int)
    vp.add_argument("--mode", default="multinomial", choices=["multinomial", "negative"])
    vp.add_argument("--c")
    vp.add_argument("--s", type=float)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--tol", default="", help="overrides such as operator=1e-12,truncated=1e-7")
    vp.add_argument("--format", default="json", choices=["json", "text"])
    vp.add_argument("--out")
    return parser


def _add_kappa_source(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="GaudinModel JSON")
    group.add_argument("--kappa", help="KrawtchoukParam JSON")


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_kappa(args) -> KrawtchoukParam:
    if args.model:
        return GaudinModel.from_dict(_read_json(args.model)).kappa
    return KrawtchoukParam.from_dict(_read_json(args.kappa))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def config_from_args(args) -> CliConfig:
    cfg = CliConfig(command=args.command, out=getattr(args, "out", None))
    if args.command == "verify":
        cfg.seed, cfg.model_path, cfg.fmt = args.seed, args.model, args.format
        try:
            cfg.tolerances = Tolerances.from_env().with_overrides(args.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.mode == "negative":
            if args.c is None or args.s is None or args.p is not None:
                raise UsageError("--mode negative needs --c and --s and no --p")
            cfg.mode, cfg.c, cfg.s = "negative", [float(v) for v in _fractions(args.c)], args.s
            return cfg
        if args.model is None:
            if args.p is None or args.alpha is None:
                raise UsageError("verify needs --p and --alpha, or --model")
            cfg.p = parse_p(args.p)
            cfg.alpha = parse_alpha(args.alpha, cfg.d)
        if args.N is None:
            raise UsageError("verify needs --N")
        cfg.N = args.N
    elif args.command == "solve":
        cfg.p = parse_p(args.p)
        cfg.alpha = parse_alpha(args.alpha, cfg.d)
    return cfg


def cmd_solve(args, cfg: CliConfig) -> int:
    try:
        model = solve(cfg.p, cfg.alpha, tol=args.root_tol, method=args.method)
    except (KDError, ArithmeticError, ValueError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "p": cfg.p, "alpha": cfg.alpha}
        roots = getattr(exc, "roots", None)
        if roots is not None:
            diag["roots"] = [str(r) for r in np.atleast_1d(roots)]
        print(json.dumps(diag), file=sys.stderr)
        return EXIT_ERROR
    text = model.to_json(indent=2) + "\n"
    if cfg.out:
        _emit(text, cfg.out)
        print(f"beta    = {model.beta[1:].tolist()}")
        print(f"p_tilde = {model.p_tilde.tolist()}")
        print(f"solver  = {json.dumps(model.solver)}")
    else:
        _emit(text, None)
    return EXIT_OK


def cmd_eval(args) -> int:
    kappa = _load_kappa(args)
    N = int(args.N) if float(args.N).is_integer() and args.N >= 0 else args.N
    print(repr(eval_poly(_ints(args.n), _ints(args.x), kappa, N)))
    return EXIT_OK


def cmd_table(args, cfg: CliConfig) -> int:
    kappa = _load_kappa(args)
    if args.involution:
        kappa = involution(kappa)
    grid = LatticeGrid(kappa.d, args.N)
    table = basis_table(kappa, args.N, grid, method=args.method)
    sections = []
    if args.gram:
        labels = ["-".join(map(str, n)) for n in grid]
        params = ModelParams.multinomial(kappa.p, args.N)
        G = gram_matrix(table, weight_vector(params, grid))
        h = norm_vector(kappa, args.N, grid)
        sections.append(("gram", labels, list(zip(labels, G))))
        rel = np.abs(np.diag(G) - h) / np.abs(h)
        sections.append(("norms", ["gram_diagonal", "formula", "relative_error"],
                         [(lab, row) for lab, row in zip(labels, np.column_stack([np.diag(G), h, rel]))]))
    _emit(table.to_csv(sections), cfg.out)
    return EXIT_OK


def cmd_verify(args, cfg: CliConfig) -> int:
    model = GaudinModel.from_dict(_read_json(cfg.model_path)) if cfg.model_path else None
    if cfg.mode == "negative":
        report = full_suite(mode="negative", c=cfg.c, s=cfg.s, seed=cfg.seed,
                            tolerances=cfg.tolerances)
    else:
        report = full_suite(cfg.p, cfg.alpha, cfg.N, seed=cfg.seed, tolerances=cfg.tolerances,
                            model=model)
    text = report.to_json(indent=2) + "\n" if cfg.fmt == "json" else report.to_text() + "\n"
    _emit(text, cfg.out)
    if cfg.out and cfg.fmt == "json":
        print(report.to_text())
    if any(c.note.startswith("error:") for c in report.failures):
        return EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"kdgaudin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "solve":
            return cmd_solve(args, cfg)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "table":
            return cmd_table(args, cfg)
        return cmd_verify(args, cfg)
    except UsageError as exc:
        print(f"kdgaudin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KDError, ArithmeticError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
