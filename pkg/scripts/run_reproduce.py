"""Write the full claims report (same as `eoakit reproduce`) and print a summary table."""

import argparse
import json
from pathlib import Path

from eoakit.report import ReproduceConfig, run_claims


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="report.json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = ReproduceConfig(seed=args.seed, restarts=args.restarts, threads=args.threads)
    doc = run_claims(cfg)
    Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    for c in doc["claims"]:
        computed = c["computed"]
        shown = f"{computed:.12g}" if isinstance(computed, float) else str(computed)[:60]
        print(f"{c['criterion']}  {c['id']:<32} {'PASS' if c['pass'] else 'FAIL'}  {shown}")
    print(f"all_pass = {doc['all_pass']}")


if __name__ == "__main__":
    main()
