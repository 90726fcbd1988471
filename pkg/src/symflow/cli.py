"""``symflow`` command line interface.

Exit codes: 0 when every check passes, 2 when an invariant is violated,
1 on usage errors (including unknown flags).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import combinatorics as comb
from . import flow
from . import verify
from .fixedpoint import L_formula_exact, f_value, gradient

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_point(text: str, n: int) -> list[Fraction]:
    try:
        coords = [Fraction(tok.strip()) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None
    if len(coords) != n:
        raise UsageError(f"expected {n} coordinates, got {len(coords)}")
    if any(c < 0 for c in coords):
        raise UsageError("coordinates must be non-negative")
    return coords


def _write(text: str, path: str | None) -> None:
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"could not write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _dump(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = payload.get("rows")
    if rows:
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow(row.values())
    else:
        writer.writerow(["key", "value"])
        for key, value in payload.items():
            writer.writerow([key, json.dumps(value)])
    return buf.getvalue()


def cmd_tables(args) -> int:
    if args.n < 0:
        raise UsageError("n must be non-negative")
    rows = []
    for k in range(args.n + 1):
        rows.append(
            {
                "k": k,
                "factorial": comb.factorial(k),
                "derangements": comb.derangements(k),
                "rencontres": comb.rencontres(args.n, k),
                "fraction": str(comb.rencontres_fraction(args.n, k)),
            }
        )
    _write(_dump({"n": args.n, "rows": rows}, args.format), args.output)
    return EXIT_OK


def cmd_eval(args) -> int:
    coords = _parse_point(args.point, args.n)
    if args.n < 2:
        raise UsageError("n must be at least 2")
    x = np.array([float(c) for c in coords])
    ev = f_value(x)
    g = gradient(x)
    payload = {
        "n": args.n,
        "point": x.tolist(),
        "L_formula": ev.L_formula,
        "L_enum": ev.L_enum,
        "L_permanent": ev.L_permanent,
        "R": ev.R,
        "f": ev.f,
        "max_disagreement": ev.max_disagreement,
        "gradient": [float(v) if ok else None for v, ok in zip(g.partials, g.valid)],
        "in_compact": flow.in_compact(x).inside,
    }
    if args.exact:
        payload["L_exact"] = str(L_formula_exact(coords))
    _write(_dump(payload, args.format), args.output)
    bad = ev.f < -args.tol or ev.max_disagreement > verify.AGREEMENT_TOL
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_verify(args) -> int:
    cfg = verify.RunConfig(
        n=args.n,
        samples=args.samples,
        seed=args.seed,
        tolerance=args.tol,
        box=args.box,
        mode=args.mode,
        output_format=args.format,
        workers=args.workers,
    )
    report = verify.run(cfg)
    _write(verify.emit_report(report, args.format), args.output)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_flow(args) -> int:
    start = np.array([float(c) for c in _parse_point(args.start, args.n)])
    result = flow.descend(start, step=args.step, max_iters=args.max_iters)
    first = flow.classify(start)
    distance = float(np.abs(result.final - 1.0).max())
    payload = {
        "n": args.n,
        "start": start.tolist(),
        "initial_region": first.region,
        "initial_witness": first.witness,
        "status": result.status,
        "iterations": result.iterations,
        "final": result.final.tolist(),
        "f_final": result.values[-1],
        "distance_to_ones": distance,
        "monotone": result.monotone,
        "f_trajectory": result.values,
    }
    _write(_dump(payload, args.format), args.output)
    bad = not result.monotone or (result.status == "stalled" and distance > verify.MIN_X_TOL)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_check_lemmas(args) -> int:
    cfg = verify.RunConfig(
        n=args.n, samples=args.samples, seed=args.seed, mode="lemmas", output_format=args.format
    )
    report = verify.check_lemmas(cfg)
    _write(verify.emit_report(report, args.format), args.output)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_seed=False):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--format", choices=verify.FORMATS, default="json")
        p.add_argument("--output", help="write to this file instead of stdout")
        if with_seed:
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("tables", help="factorials, derangement and rencontres numbers")
    common(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("eval", help="evaluate L_n, R_n and f_n at a point")
    common(p)
    p.add_argument("--point", required=True, help="comma-separated coordinates (fractions allowed)")
    p.add_argument("--exact", action="store_true", help="also report L_n as an exact fraction")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="search for violations of the inequality")
    common(p, with_seed=True)
    p.add_argument("--mode", choices=("sample", "grid", "minimize"), default="sample")
    p.add_argument("--box", type=float, help="per-coordinate upper bound (default 6n)")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--workers", type=int, help="worker threads (default: SYMFLOW_THREADS or up to 4)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("flow", help="follow the certified descent directions from a start point")
    common(p)
    p.add_argument("--start", required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("check-lemmas", help="audit the region and operator lemmas")
    common(p, with_seed=True)
    p.set_defaults(func=cmd_check_lemmas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"symflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"symflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
