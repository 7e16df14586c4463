"""Deficit landscape over x|u0> + y|u1>: grid minimum vs. grid size, with the refined minimum."""

import argparse
import time

from eoakit.assistance import span_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--refine", type=int, default=400)
    args = ap.parse_args()

    print(f"{'grid':>6} {'grid min':>16} {'refined min':>16} {'|x|':>10} {'seconds':>8}")
    for g in args.grids:
        t0 = time.perf_counter()
        res = span_scan(g, args.refine)
        x, _ = res.argmin
        print(f"{g:>6} {res.grid_min:>16.12f} {res.min_deficit:>16.12f} {abs(x):>10.6f} {time.perf_counter() - t0:>8.2f}")


if __name__ == "__main__":
    main()
