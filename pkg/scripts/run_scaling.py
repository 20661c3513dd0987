"""Sweep d at fixed ell and report time, workspace and work counts for both methods.

    python scripts/run_scaling.py --d 8:16:2 --ell 2,3 --out results/scaling.csv
"""
import argparse
import sys
from pathlib import Path

from ttfsi.bench import emit_report, run_matrix
from ttfsi.cli import _ints


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--d", type=_ints, default=list(range(8, 17, 2)))
    p.add_argument("--ell", type=_ints, default=[2, 3])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", type=Path, default=None, help="CSV path; a markdown summary always goes to stdout")
    args = p.parse_args(argv)

    runs = run_matrix(args.d, args.ell, seeds=args.seeds, repeats=args.repeats)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(emit_report(runs, "csv"))
    sys.stdout.write(emit_report(runs, "markdown"))

    print("\nnormalized TT work and workspace")
    print("| d | ell | madds / (ell^2 d^3 2^d) | peak elements / (ell d 2^d) |")
    print("|---|---|---|---|")
    for r in runs:
        if r.method == "tt" and not r.skipped:
            n = r.ell * r.d * 2**r.d
            print(f"| {r.d} | {r.ell} | {r.madds / (r.ell * r.d**2 * n):.4f} | {r.peak_bytes / 8 / n:.3f} |")


if __name__ == "__main__":
    main()
