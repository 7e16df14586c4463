"""How the EoA estimate for |Phi> improves with the number of restarts."""

import argparse
import time

import numpy as np

from eoakit.assistance import EoaConfig, eoa_optimize
from eoakit.states import make_phi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    res = eoa_optimize(make_phi(), cfg=EoaConfig(restarts=args.restarts, seed=args.seed, threads=args.threads))
    best_so_far = np.maximum.accumulate(res.restart_values)
    for k, (v, b) in enumerate(zip(res.restart_values, best_so_far)):
        print(f"restart {k:>3}: {v:.12f}   best {b:.12f}")
    print(f"EoA estimate {res.value:.12f} (upper bound {res.upper_bound:.12f}), {time.perf_counter() - t0:.1f} s")
    print("certificate weights:", np.round(res.certificate.weights, 6))


if __name__ == "__main__":
    main()
