"""Single large run: fsi_tt at d=20, ell=3 on a synthetic game, with workspace accounting.

    python scripts/scale_demo.py --d 20 --ell 3 --kind random
"""
import argparse
import resource
import time

from ttfsi.fsi import RunInfo, fsi_tt
from ttfsi.games import KINDS, GameSpec, generate
from ttfsi.lattice import mask_to_features


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--d", type=int, default=20)
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--kind", choices=KINDS, default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top", type=int, default=5)
    args = p.parse_args(argv)

    t0 = time.perf_counter()
    v = generate(GameSpec(args.kind, args.d, k=min(args.ell, args.d), seed=args.seed))
    t1 = time.perf_counter()
    info = RunInfo()
    scores = fsi_tt(v, args.ell, strict_zero=False, info=info)
    t2 = time.perf_counter()

    print(f"game     {args.kind} d={args.d} generated in {t1 - t0:.2f} s")
    print(f"fsi_tt   ell={args.ell}: {len(scores)} scores in {t2 - t1:.2f} s")
    print(f"work     {info.madds:,} multiply-adds")
    print(f"memory   {info.peak_bytes / 2**30:.3f} GiB accounted, "
          f"{resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 2**20:.3f} GiB max RSS")
    for mask, value in scores.top(args.top):
        print(f"  {mask_to_features(mask)}  {value:+.6g}")


if __name__ == "__main__":
    main()
