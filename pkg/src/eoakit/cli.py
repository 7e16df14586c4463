"""Command-line front end.

Exit codes: 0 success, 1 a claim or validation failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assistance import EoaConfig, eoa_optimize, ncopy_deficit_scan, span_scan
from .fileio import read_protocol, read_state, write_state
from .locc import BUILTIN_PROTOCOLS, MixedLeafError, average_final_entanglement, run_protocol
from .measures import MEASURES, MixedStateError, cut_spectrum, get_measure, parse_cut
from .report import ReproduceConfig, run_claims
from .states import catalog


class UsageError(Exception):
    pass


def load_state(spec: str, renormalize: bool = False):
    """``catalog:NAME`` or a path to a state file."""
    if spec.startswith("catalog:"):
        name = spec.split(":", 1)[1]
        states = catalog()
        if name not in states:
            raise UsageError(f"unknown catalog state {name!r}; available: {', '.join(sorted(states))}")
        return states[name]
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"no such state file: {spec}")
    return read_state(path, renormalize=renormalize)


def _cut(text: str | None, state):
    labels = state.space.labels
    if text is None:
        return (labels[:1], labels[1:])
    try:
        return parse_cut(text, labels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_reproduce(args) -> int:
    cfg = ReproduceConfig(
        seed=args.seed,
        restarts=args.restarts,
        grid=args.grid,
        refine=args.refine,
        ncopy_samples=args.samples,
        povm_elements=args.povm_elements,
        threads=args.threads,
    )

    def show(c):
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] criterion {c.criterion} {c.id}: {c.description} ({c.runtime_s:.2f} s)", flush=True)

    doc = run_claims(cfg, progress=None if args.quiet else show)
    text = json.dumps(doc, indent=1) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"report written to {args.out}; all_pass={doc['all_pass']}")
    return 0 if doc["all_pass"] else 1


def cmd_measure(args) -> int:
    state = load_state(args.state, args.renormalize)
    measure = get_measure(args.measure)
    cut = _cut(args.cut, state)
    value = float(measure.of_spectrum(cut_spectrum(state, cut)))
    print(f"{value:.12g}")
    return 0


def cmd_eoa(args) -> int:
    state = load_state(args.state, args.renormalize)
    cfg = EoaConfig(
        restarts=args.restarts,
        max_ensemble=args.max_ensemble,
        seed=args.seed,
        refine_iters=args.refine_iters,
        threads=args.threads,
    )
    t0 = time.perf_counter()
    res = eoa_optimize(state, get_measure(args.measure), cfg)
    print(f"value         {res.value:.12g}")
    print(f"upper bound   {res.upper_bound:.12g}")
    print(f"restarts      {res.restarts_used} (best #{res.best_restart})")
    print(f"runtime       {time.perf_counter() - t0:.2f} s")
    print("certificate")
    for p, s in zip(res.certificate.weights, res.certificate.states):
        e = get_measure(args.measure).evaluate(s)
        print(f"  p = {p:.10f}   E = {e:.10f}")
    return 0


def cmd_simulate(args) -> int:
    state = load_state(args.state, args.renormalize)
    if args.protocol in BUILTIN_PROTOCOLS:
        protocol = BUILTIN_PROTOCOLS[args.protocol]()
    elif Path(args.protocol).exists():
        protocol = read_protocol(args.protocol)
    else:
        raise UsageError(f"protocol must be one of {sorted(BUILTIN_PROTOCOLS)} or an existing file")
    cut = _cut(args.cut or "A:B", state)
    measure = get_measure(args.measure)
    leaves = run_protocol(state, protocol)
    print(f"{'transcript':<20} {'probability':>14} {'entanglement':>14}")
    for b in leaves:
        e = float(measure.of_spectrum(cut_spectrum(b.state, cut)))
        print(f"{'/'.join(b.transcript) or '(root)':<20} {b.probability:>14.10f} {e:>14.10f}")
    print(f"average {average_final_entanglement(leaves, cut, measure):.12g}")
    return 0


def cmd_scan(args) -> int:
    if args.ncopy is not None:
        res = ncopy_deficit_scan(args.ncopy, args.samples, args.seed)
        print(f"n             {args.ncopy}")
        print(f"samples       {res.samples}")
        print(f"min deficit   {res.min_deficit:.12g}")
        print(f"argmin        {np.array2string(np.asarray(res.argmin), precision=6)}")
        return 0 if res.min_deficit > 0 else 1
    res = span_scan(args.grid, args.refine, args.threads)
    x, y = res.argmin
    print(f"grid          {args.grid} x {args.grid}")
    print(f"grid min      {res.grid_min:.12g}")
    print(f"min deficit   {res.min_deficit:.12g}")
    print(f"argmin        x = {complex(x):.6f}, y = {complex(y):.6f}")
    print(f"evaluations   {res.samples}")
    return 0 if res.min_deficit > 0 else 1


def cmd_export(args) -> int:
    states = catalog()
    names = args.names or sorted(states)
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in names:
        if name not in states:
            raise UsageError(f"unknown catalog state {name!r}")
        write_state(out / f"{name}.json", states[name])
        print(out / f"{name}.json")
    return 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _grid(text: str) -> int:
    v = int(text)
    if v < 64:
        raise argparse.ArgumentTypeError("grid must be >= 64")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eoakit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"eoakit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    measures = sorted(MEASURES)

    r = sub.add_parser("reproduce", help="run every acceptance claim and write a JSON report")
    r.add_argument("--out", default="report.json", help="report path, or - for stdout")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--restarts", type=_positive, default=64)
    r.add_argument("--grid", type=_grid, default=512)
    r.add_argument("--refine", type=int, default=400)
    r.add_argument("--samples", type=_positive, default=10_000, help="n-copy coefficient samples")
    r.add_argument("--povm-elements", type=_positive, default=10_000)
    r.add_argument("--threads", type=_positive, default=1)
    r.add_argument("--quiet", action="store_true")
    r.set_defaults(func=cmd_reproduce)

    def state_args(sp):
        sp.add_argument("--state", required=True, help="state file or catalog:NAME")
        sp.add_argument("--renormalize", action="store_true", help="rescale inputs that are not normalized")
        sp.add_argument("--measure", default="entropy", choices=measures)

    m = sub.add_parser("measure", help="pure-state entanglement across a cut")
    state_args(m)
    m.add_argument("--cut", help="e.g. A:B or AB:C (default: first party vs the rest)")
    m.set_defaults(func=cmd_measure)

    e = sub.add_parser("eoa", help="optimize the entanglement of assistance")
    state_args(e)
    e.add_argument("--restarts", type=_positive, default=16)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--max-ensemble", type=_positive, default=None)
    e.add_argument("--refine-iters", type=int, default=2000)
    e.add_argument("--threads", type=_positive, default=1)
    e.set_defaults(func=cmd_eoa)

    s = sub.add_parser("simulate", help="run an LOCC protocol tree")
    state_args(s)
    s.add_argument("--protocol", required=True, help="protocol file, or phi / mixed")
    s.add_argument("--cut", default=None, help="final cut (default A:B)")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("scan", help="deficit scan over span{u0, u1} or its two-copy combinations")
    c.add_argument("--grid", type=_grid, default=512)
    c.add_argument("--refine", type=int, default=400)
    c.add_argument("--ncopy", type=int, choices=[2], default=None)
    c.add_argument("--samples", type=_positive, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--threads", type=_positive, default=1)
    c.set_defaults(func=cmd_scan)

    x = sub.add_parser("export", help="write catalog states as state files")
    x.add_argument("--dir", default=".")
    x.add_argument("names", nargs="*")
    x.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"eoakit: error: {exc}", file=sys.stderr)
        return 2
    except (MixedStateError, MixedLeafError, ValueError) as exc:
        print(f"eoakit: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"eoakit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
