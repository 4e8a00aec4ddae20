"""``concur`` command-line interface.

Exit codes: 0 ok, 1 bad input or arguments, 2 unnormalized state without
``--allow-unnormalized``, 3 internal consistency failure, 4 oracle size guard,
5 engine/oracle mismatch.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .engine import ConcurrenceReport, calibrate_norm, three_partite_concurrence, total_concurrence
from .errors import ConcurError, NormalizationError, SizeGuardError
from .oracle import ORACLE_MAX_DIM, verify_state
from .roof import roof_estimate
from .state import random_state

EXIT_OK, EXIT_INPUT, EXIT_UNNORMALIZED, EXIT_INCONSISTENT, EXIT_SIZE, EXIT_MISMATCH = range(6)
PATH_TOL = 1e-12
VERIFY_TOL = 1e-10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.9f}"


def _dims_arg(text: str):
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("every dimension must be >= 2")
    return dims


def _emit(text: str, out):
    if out:
        io.write_atomic(out, text)
    else:
        sys.stdout.write(text)


def format_report(report: ConcurrenceReport) -> str:
    lines = [
        f"dims           {','.join(map(str, report.dims))}",
        f"normalization  {fmt(report.normalization)}",
    ]
    for c in report.contributions:
        label = "W" if c.order == 2 else f"GHZ{c.order}"
        lines.append(f"  {label:<6} S={{{','.join(map(str, c.active))}}}  {fmt(c.value)}")
    lines.append(f"wSum           {fmt(report.w_sum)}")
    for s, v in report.ghz_sums.items():
        lines.append(f"ghzSum[{s}]      {fmt(v)}")
    lines.append(f"total          {fmt(report.total)}")
    return "\n".join(lines) + "\n"


def cmd_compute(args) -> int:
    state = io.read_state(args.input)
    report = total_concurrence(state, args.normalization, allow_unnormalized=args.allow_unnormalized)
    if state.m == 3:
        literal = three_partite_concurrence(state, args.normalization, allow_unnormalized=args.allow_unnormalized)
        for a, b in zip(report.contributions, literal.contributions):
            if a.active != b.active or abs(a.value - b.value) > PATH_TOL:
                raise _Fail(EXIT_INCONSISTENT,
                            f"three-partite closed form disagrees on S={a.active}: {a.value!r} vs {b.value!r}")
    if args.report == "json":
        _emit(io.dumps(report.to_dict()), args.out)
    else:
        _emit(format_report(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    state = io.read_state(args.input)
    if state.size > ORACLE_MAX_DIM:
        raise _Fail(EXIT_SIZE, f"prod(dims) = {state.size} exceeds the oracle limit {ORACLE_MAX_DIM}")
    rows = verify_state(state)
    worst = max(r[3] for r in rows)
    if args.report == "json":
        doc = {
            "dims": list(state.dims),
            "sets": [{"activeSet": list(S), "engine": e, "oracle": o, "deviation": d} for S, e, o, d in rows],
            "maxDeviation": worst,
            "tolerance": VERIFY_TOL,
            "ok": worst <= VERIFY_TOL,
        }
        _emit(io.dumps(doc), args.out)
    else:
        lines = [f"S={{{','.join(map(str, S))}}}  engine {fmt(e)}  oracle {fmt(o)}  deviation {d:.3e}"
                 for S, e, o, d in rows]
        lines.append(f"max deviation {worst:.3e} ({'ok' if worst <= VERIFY_TOL else 'MISMATCH'})")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if worst <= VERIFY_TOL else EXIT_MISMATCH


def cmd_random(args) -> int:
    if args.count < 1:
        raise _Fail(EXIT_INPUT, "--count must be >= 1")
    outdir = Path(args.out or ".")
    results = []
    docs = []
    for i in range(args.count):
        seed = (args.seed + i) & 0xFFFFFFFFFFFFFFFF
        state = random_state(args.dims, seed)
        total = total_concurrence(state, args.normalization).total if state.m >= 3 else None
        name = f"state_{i:03d}.json"
        docs.append((outdir / name, io.dumps(io.state_to_dict(state))))
        results.append({"file": name, "seed": seed, "total": total})
    # every state is built before anything is written
    for path, text in docs:
        io.write_atomic(path, text)
    if args.report == "json":
        sys.stdout.write(io.dumps({"dims": list(args.dims), "states": results}))
    else:
        for r in results:
            total = "n/a" if r["total"] is None else fmt(r["total"])
            sys.stdout.write(f"{r['file']}  seed {r['seed']}  total {total}\n")
    return EXIT_OK


def cmd_roof(args) -> int:
    rho = io.read_density(args.input)
    try:
        rho.validate()
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, f"{args.input}: {exc}") from None
    result = roof_estimate(rho, K=args.ensemble_size, restarts=args.restarts, iters=args.iters,
                           seed=args.seed, norm=args.normalization)
    if args.report == "json":
        doc = {
            "value": result.value,
            "isUpperBound": True,
            "eigenAverage": result.eigen_average,
            "ensemble": [{"weight": p, "stateRef": io.state_to_dict(s)}
                         for p, s in zip(result.ensemble.weights, result.ensemble.states)],
        }
        _emit(io.dumps(doc), args.out)
    else:
        lines = [
            f"upper bound    {fmt(result.value)}",
            f"eigen average  {fmt(result.eigen_average)}",
            f"members        {len(result.ensemble)}",
        ]
        lines += [f"  weight {fmt(p)}" for p in result.ensemble.weights]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    sys.stdout.write(fmt(calibrate_norm(args.m)) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--normalization", choices=("raw", "ghz"), default="raw")
    common.add_argument("--report", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report (or, for random, the state files) here")

    parser = _Parser(prog="concur", description="Generalized concurrence of multipartite states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", parents=[common], help="concurrence of a pure state file")
    p.add_argument("input")
    p.add_argument("--allow-unnormalized", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", parents=[common], help="check the closed forms against the oracle")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", parents=[common], help="write seeded random state files")
    p.add_argument("--dims", type=_dims_arg, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("roof", parents=[common], help="convex-roof upper bound for a density file")
    p.add_argument("input")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ensemble-size", type=int, default=None)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--iters", type=int, default=200)
    p.set_defaults(func=cmd_roof)

    p = sub.add_parser("calibrate", help="print the GHZ-calibrated normalization")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"concur: {exc}", file=sys.stderr)
        return exc.code
    except NormalizationError as exc:
        print(f"concur: {exc}", file=sys.stderr)
        return EXIT_UNNORMALIZED
    except SizeGuardError as exc:
        print(f"concur: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ConcurError, ValueError, OSError) as exc:
        print(f"concur: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
