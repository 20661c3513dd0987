"""``ttfsi`` command line: gen | compute | verify | bench.

Exit codes: 0 success, 2 bad arguments, 3 I/O or format error, 4 memory cap
exceeded, 5 verification failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench, io
from .correction import MAX_D
from .fsi import BASELINE_MAX_D, FsiConfig, ResidualError, compute, fsi_tt, verify
from .games import KINDS, GameSpec, generate
from .lattice import mask_to_features
from .sweep import MemoryCapExceeded, default_memory_cap

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_MEMORY, EXIT_VERIFY = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _ints(text: str) -> list[int]:
    """``8,10,12`` or inclusive range ``start:stop[:step]``."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",")]


def cmd_gen(args) -> int:
    if args.d > MAX_D:
        raise UsageError(f"d must be <= {MAX_D}")
    spec = GameSpec(args.kind, args.d, args.k, args.seed, args.scale, args.weights)
    v = generate(spec)
    if args.out.suffix == ".json":
        io.write_json_values(args.out, v)
    else:
        io.write_vfn1(args.out, v)
    print(f"wrote {spec.kind} game d={spec.d} to {args.out}")
    return EXIT_OK


def cmd_compute(args) -> int:
    v = io.read_value_function(args.input)
    if not 1 <= args.ell <= v.d:
        raise UsageError(f"ell must be in [1, {v.d}], got {args.ell}")
    if args.method == "baseline" and v.d > BASELINE_MAX_D:
        raise UsageError(f"baseline is limited to d <= {BASELINE_MAX_D}")
    if args.method == "tt":
        scores = fsi_tt(v, args.ell, strict_zero=args.strict_zero, memory_cap=args.mem_cap)
    else:
        scores = compute(v, FsiConfig("baseline", args.ell))
    if args.out is not None:
        fmt = args.format or ("csv" if args.out.suffix == ".csv" else "json")
        text = io.scores_to_csv(scores) if fmt == "csv" else io.scores_to_json(scores)
        args.out.write_text(text)
    print(f"d={v.d} ell={args.ell} method={args.method} offset={v.offset!r} scores={len(scores)}")
    for mask, value in scores.top(args.top_k):
        print(f"  {mask_to_features(mask)}  {value:+.6g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.d <= BASELINE_MAX_D:
        raise UsageError(f"d must be in [1, {BASELINE_MAX_D}]")
    if not 1 <= args.ell <= args.d:
        raise UsageError(f"ell must be in [1, {args.d}]")
    worst = 0.0
    failed = 0
    for trial in range(args.trials):
        v = generate(GameSpec("random", args.d, seed=args.seed + trial))
        report = verify(v, args.ell, args.tol)
        worst = max(worst, report.max_abs_diff)
        failed += not report.passed
    status = "PASS" if not failed else f"FAIL ({failed}/{args.trials})"
    print(f"d={args.d} ell={args.ell} trials={args.trials} worst_max_abs_diff={worst:.3e} tol={args.tol:g} {status}")
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_bench(args) -> int:
    for m in args.methods:
        if m not in bench.METHODS:
            raise UsageError(f"unknown method {m!r}")
    if args.format not in ("csv", "json", "markdown"):
        raise UsageError(f"unknown format {args.format!r}")
    runs = bench.run_matrix(args.d, args.ell, args.methods, args.seeds, args.repeats,
                            memory_cap=args.mem_cap, time_it=not args.no_time)
    text = bench.emit_report(runs, args.format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttfsi", description="Exact Faithful Shapley Interaction scores.")
    parser.add_argument("--mem-cap", type=int, default=None,
                        help="workspace cap in bytes (default: $TTFSI_MEM_CAP_BYTES or 8 GiB)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic game")
    p.add_argument("--kind", choices=KINDS, default="random")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=2, help="Möbius order for k-additive games")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--weights", type=_floats, default=None,
                   help="comma-separated per-feature coefficients / voting weights")
    p.add_argument("--out", type=Path, required=True, help="VFN1 file, or .json")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compute", help="score a value function")
    p.add_argument("input", type=Path)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--method", choices=("tt", "baseline"), default="tt")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--strict-zero", action=argparse.BooleanOptionalAction, default=__debug__,
                   help="check that the correction vanishes outside |S| <= ell")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="compare the sweep against the baseline on random games")
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time both methods over a grid")
    p.add_argument("--d", type=_ints, default=[8, 10, 12])
    p.add_argument("--ell", type=_ints, default=[2, 3])
    p.add_argument("--methods", type=lambda s: s.split(","), default=list(bench.METHODS))
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", default="csv")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--no-time", action="store_true", help="zero wall times for golden files")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.mem_cap is None:
        args.mem_cap = default_memory_cap()
    try:
        return args.func(args)
    except (io.FormatError, OSError) as exc:
        print(f"ttfsi: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"ttfsi: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except MemoryCapExceeded as exc:
        print(f"ttfsi: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except ResidualError as exc:
        print(f"ttfsi: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
