"""Acceptance criteria at full size, one PASS/FAIL line per criterion.

The claims are computed once per module with the default reproduce
settings (64 restarts, 512 x 512 grid, 10^4 samples), which takes about
two minutes.
"""

import time

import numpy as np
import pytest

from eoakit.report import ReproduceConfig, U_DECOMPOSITION_AVERAGE, run_claims

SPAN_MIN_DEFICIT = 0.08372213957745742
pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def report():
    t0 = time.perf_counter()
    doc = run_claims(ReproduceConfig())
    doc["total_runtime_s"] = time.perf_counter() - t0
    return doc


@pytest.fixture
def announce(capsys):
    def show(criterion, ok, text):
        with capsys.disabled():
            print(f"\ncriterion {criterion}: {'PASS' if ok else 'FAIL'}  {text}")

    return show


def claims(report, criterion):
    return {c["id"]: c for c in report["claims"] if c["criterion"] == criterion}


def test_criterion_1_eoc_phi(report, announce):
    c = claims(report, 1)["eoc_phi"]
    ok = c["details"]["leaves"] == 4 and abs(c["computed"] - 2.0) <= 1e-9 and c["runtime_s"] < 1.0
    ok = ok and all(abs(e - 2.0) <= 1e-9 for e in c["details"]["leaf_entropies"])
    announce(1, ok, f"EoC(Phi) = {c['computed']!r} over 4 leaves in {c['runtime_s']:.3f} s")
    assert ok and c["pass"]


def test_criterion_2_eoa_phi_below_two(report, announce):
    cs = claims(report, 2)
    span, eoa = cs["eoa_phi_span_min_deficit"], cs["eoa_phi_value"]
    ok = span["computed"] > 0 and abs(span["computed"] - SPAN_MIN_DEFICIT) <= 1e-9
    ok = ok and U_DECOMPOSITION_AVERAGE - 1e-3 <= eoa["computed"] < 2.0 and eoa["runtime_s"] < 300
    announce(
        2, ok,
        f"span min deficit {span['computed']:.12g}, EoA(Phi) {eoa['computed']:.12g} "
        f"(64 restarts, {eoa['runtime_s']:.1f} s)",
    )
    assert ok and span["pass"] and eoa["pass"]


def test_criterion_3_non_monotonicity(report, announce):
    c = claims(report, 3)["non_monotonicity"]
    eoc, eoa = c["details"]["eoc_phi"], c["details"]["eoa_phi"]
    ok = eoc > eoa
    announce(3, ok, f"EoC {eoc:.12g} > EoA {eoa:.12g}, gap {eoc - eoa:.6g}")
    assert ok and c["pass"]


def test_criterion_4_concavity_counterexample(report, announce):
    cs = claims(report, 4)
    mixed, prod = cs["eoa_mixed_2qubit"], cs["eoa_product"]
    ok = abs(mixed["computed"] - 1.0) <= 1e-6 and abs(prod["computed"]) <= 1e-9
    ok = ok and np.allclose(mixed["details"]["certificate_weights"], 0.25)
    announce(4, ok, f"EoA(I/4) = {mixed['computed']:.12g} with 4 Bell-type members, EoA(product) = {prod['computed']!r}")
    assert ok and mixed["pass"] and prod["pass"]


def test_criterion_5_mixed_example(report, announce):
    cs = claims(report, 5)
    eoc = cs["mixed_example_eoc"]
    support = cs["mixed_example_charlie_support"]
    purity = cs["mixed_example_charlie_purity"]
    delta = purity["details"]["delta"]
    ok = abs(eoc["computed"] - 1.0) <= 1e-9 and max(eoc["details"]["leaf_deficits"]) <= 1e-9
    ok = ok and support["computed"] >= 3 and delta > 0 and support["details"]["elements"] == 10_000
    announce(
        5, ok,
        f"EoC = {eoc['computed']!r}; min support {support['computed']} over 10^4 elements; "
        f"max purity {purity['computed']:.10f}, delta {delta:.10f}",
    )
    assert ok and eoc["pass"] and support["pass"] and purity["pass"]


def test_criterion_6_eq7(report, announce):
    cs = claims(report, 6)
    agree, cond = cs["eq7_agreement"], cs["eq7_equal_conditions"]
    ok = agree["computed"] <= 1e-9 and agree["details"]["samples"] == 1000 and cond["pass"]
    announce(6, ok, f"max |analytic - direct| = {agree['computed']:.3g} over 10^3 vectors; {len(cond['computed'])} counterexamples")
    assert ok and agree["pass"]


def test_criterion_7_eq6_discrepancy(report, announce):
    c = claims(report, 7)["eq6_discrepancy"]
    probes = c["details"]["probes"]
    ok = len(probes) >= 3 and all("printed" in p and "oracle" in p for p in probes) and c["computed"] > 0
    announce(7, ok, f"{len(probes)} probes emitted (printed, corrected, oracle); min deficit off x = y = 0 is {c['computed']:.12g}")
    assert ok and c["pass"]


def test_criterion_8_ncopy(report, announce):
    c = claims(report, 8)["ncopy_nonmaximality"]
    ok = c["computed"] > 0 and c["details"]["samples"] == 10_000
    announce(8, ok, f"min two-copy deficit {c['computed']:.12g} over 10^4 vectors")
    assert ok and c["pass"]


def test_criterion_9_properties(report, announce):
    c = claims(report, 9)["property_suites"]
    ok = c["pass"] and c["details"]["instances"] == 200 and report["total_runtime_s"] < 600
    worst = ", ".join(f"{k} {v:.1e}" for k, v in c["computed"].items())
    announce(9, ok, f"200 instances each; worst errors: {worst}; claims total {report['total_runtime_s']:.0f} s")
    assert ok


def test_report_covers_every_criterion_once_per_id(report):
    ids = [c["id"] for c in report["claims"]]
    assert len(ids) == len(set(ids))
    assert {c["criterion"] for c in report["claims"]} == set(range(1, 10))
    assert report["all_pass"]
