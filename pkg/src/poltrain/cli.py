"""Batch front end: law suites, train batteries, closure and transform dumps.

Reports are CSV files with a JSON metadata sidecar; identical
configuration and seed produce byte-identical files (timings go to
stderr only).  Exit codes: 0 success, 1 property failure, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bernoulli import (
    closure_experiment,
    compression_product_defect,
    coupling_product_check,
    stabilization_cutoff,
)
from .errors import PoltrainError, ValidationError
from .finspace import Partition
from .laws import ALL_LAWS, run_battery
from .mellin import exponent_for_r, operator_norm, transform, transform_rows
from .polymorphism import Polymorphism, require_valid
from .randgen import rand_stabilizer_elem, spawn


def _parse_grid(text: str) -> list[tuple[float, float]]:
    grid = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            r_str, s_str = chunk.split(":")
            r = float(Fraction(r_str))
            s = float(Fraction(s_str))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad grid entry {chunk!r}; expected r:s") from exc
        if not 0 <= r <= 1:
            raise ValidationError(f"grid r value {r} outside [0, 1]")
        grid.append((r, s))
    if not grid:
        raise ValidationError("empty grid")
    return grid


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational {text!r}") from exc


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_meta(path: Path, config: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump({"version": __version__, **config}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_polymorphism(path: str) -> Polymorphism:
    with open(path) as fh:
        return require_valid(Polymorphism.from_json(json.load(fh)))


def cmd_laws(args) -> int:
    results = run_battery(ALL_LAWS, seed=args.seed, cases=args.cases, tol=args.tol, size=args.size)
    out = Path(args.out)
    rows = [(r.name, r.cases, repr(r.max_defect), "ok" if r.ok else "FAIL") for r in results]
    _write_csv(out / "laws.csv", ["law", "cases", "max_defect", "status"], rows)
    _write_meta(out / "laws_meta.json", {
        "command": "laws", "seed": args.seed, "cases": args.cases,
        "tol": args.tol, "size": args.size,
    })
    failures = [r for r in results if not r.ok]
    if failures:
        with open(out / "laws_counterexamples.json", "w") as fh:
            json.dump({r.name: r.failure for r in failures}, fh, indent=2, sort_keys=True, default=str)
        print(f"{len(failures)} law(s) failed; counterexamples written", file=sys.stderr)
        return 1
    return 0


def cmd_train(args) -> int:
    beta2 = args.beta if args.beta2 is None else args.beta2
    if beta2 != args.beta:
        raise ValidationError(f"inner indices do not match: {args.beta} vs {beta2}")
    if min(args.alpha, args.beta, args.gamma) < 0:
        raise ValidationError("stabilizer indices must be nonnegative")
    if args.support < 1:
        raise ValidationError("support bound must be positive")
    p = _parse_fraction(args.p)
    if not 0 < p < 1:
        raise ValidationError(f"coin parameter must lie in (0, 1), got {p}")
    rows = []
    failed = 0
    for case in range(args.cases):
        rng = spawn(args.seed, case)
        g = rand_stabilizer_elem(rng, 0, args.support)
        h = rand_stabilizer_elem(rng, 0, args.support)
        cutoff = stabilization_cutoff(g, h, args.alpha, args.beta, args.gamma)
        coupling_ok = coupling_product_check(g, h, args.alpha, args.beta, args.gamma, p)
        defect = compression_product_defect(g, h, args.alpha, args.beta, args.gamma, p)
        ok = coupling_ok and defect == 0
        failed += not ok
        rows.append((case, g.to_cycles(), h.to_cycles(), cutoff, str(defect),
                     "ok" if ok else "FAIL"))
    out = Path(args.out)
    _write_csv(out / "train.csv",
               ["case", "g", "h", "stabilization_n", "compression_defect", "status"], rows)
    _write_meta(out / "train_meta.json", {
        "command": "train", "seed": args.seed, "cases": args.cases,
        "alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
        "support": args.support, "p": str(p),
    })
    if failed:
        print(f"{failed} train case(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_closure(args) -> int:
    poly = _load_polymorphism(args.infile)
    with open(args.chain) as fh:
        chain = [Partition.from_json(part) for part in json.load(fh)]
    grid = _parse_grid(args.grid)
    report = closure_experiment(poly, chain, grid=grid)
    out = Path(args.out)
    rows = [("distance", k, "", "", repr(d)) for k, d in enumerate(report.distances)]
    rows += [("pairing_defect", k, repr(r), repr(s), repr(d)) for k, r, s, d in report.defects]
    _write_csv(out / "closure.csv", ["kind", "step", "r", "s", "value"], rows)
    _write_meta(out / "closure_meta.json", {
        "command": "closure", "in": args.infile, "chain": args.chain,
        "grid": args.grid, "steps": len(chain),
    })
    return 0


def cmd_mellin(args) -> int:
    poly = _load_polymorphism(args.infile)
    grid = _parse_grid(args.grid)
    out = Path(args.out)
    _write_csv(out / "transform.csv", ["r", "s", "x", "y", "re", "im"],
               transform_rows(poly, grid))
    norm_rows = []
    for r, s in grid:
        if float(r) in (0.0, 0.5, 1.0):
            exponent = exponent_for_r(r)
            norm = operator_norm(transform(poly, r, s), exponent)
            norm_rows.append((r, s, str(exponent), repr(norm)))
    _write_csv(out / "norms.csv", ["r", "s", "exponent", "norm"], norm_rows)
    _write_meta(out / "mellin_meta.json", {
        "command": "mellin", "in": args.infile, "grid": args.grid,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poltrain",
        description="Law suites and experiments for polymorphisms of finite measure spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    laws = sub.add_parser("laws", help="run the randomized law batteries")
    laws.add_argument("--seed", type=int, default=42)
    laws.add_argument("--cases", type=int, default=1000)
    laws.add_argument("--tol", type=float, default=1e-12)
    laws.add_argument("--size", type=int, default=6, help="size bound for random objects")
    laws.add_argument("--out", default=".")
    laws.set_defaults(func=cmd_laws)

    train = sub.add_parser("train", help="coset product batteries on the coin space")
    train.add_argument("--seed", type=int, default=42)
    train.add_argument("--cases", type=int, default=100)
    train.add_argument("--alpha", type=int, default=1)
    train.add_argument("--beta", type=int, default=1)
    train.add_argument("--beta2", type=int, default=None,
                       help="inner index of the second factor (must equal --beta)")
    train.add_argument("--gamma", type=int, default=1)
    train.add_argument("--support", type=int, default=4)
    train.add_argument("--p", default="1/2")
    train.add_argument("--out", default=".")
    train.set_defaults(func=cmd_train)

    closure = sub.add_parser("closure", help="squeeze a polymorphism along a partition chain")
    closure.add_argument("--in", dest="infile", required=True)
    closure.add_argument("--chain", required=True)
    closure.add_argument("--grid", default="0:0,1/2:1,1:0")
    closure.add_argument("--out", default=".")
    closure.set_defaults(func=cmd_closure)

    mellin_cmd = sub.add_parser("mellin", help="dump transform entries and norms over a grid")
    mellin_cmd.add_argument("--in", dest="infile", required=True)
    mellin_cmd.add_argument("--grid", default="0:0,1/2:0,1/2:1,1:0")
    mellin_cmd.add_argument("--out", default=".")
    mellin_cmd.set_defaults(func=cmd_mellin)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        code = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PoltrainError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    print(f"{args.command}: done in {time.monotonic() - started:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
