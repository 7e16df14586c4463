"""Two-copy non-maximality: smallest deficit over random coefficient vectors, for several seeds."""

import argparse

import numpy as np

from eoakit.assistance import ncopy_deficit_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    mins = []
    for seed in range(args.seeds):
        res = ncopy_deficit_scan(2, args.samples, seed)
        mins.append(res.min_deficit)
        print(f"seed {seed}: min deficit {res.min_deficit:.12f}")
    print(f"overall min {min(mins):.12f}, mean of per-seed minima {np.mean(mins):.12f}")


if __name__ == "__main__":
    main()
