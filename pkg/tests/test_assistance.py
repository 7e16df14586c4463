import numpy as np
import pytest
from hypothesis import given, strategies as st

from eoakit.assistance import (
    EoaConfig,
    NCopyCombo,
    eoa_optimize,
    eoa_upper_bound,
    eq6_corrected,
    eq6_printed,
    equal_lambda_conditions,
    lambda_from_moments,
    lambda_from_overlaps,
    ncopy_deficit,
    ncopy_deficit_scan,
    ncopy_lambda_analytic,
    span_deficit,
    span_deficit_oracle,
    span_scan,
)
from eoakit import qmath
from eoakit.measures import ENTROPY
from eoakit.states import DensityOperator, PartySpace, make_phi, make_product, make_u, purify

seeds = st.integers(0, 2**32 - 1)
SPAN_MIN_DEFICIT = 0.08372213957745742


def test_config_validation():
    with pytest.raises(ValueError):
        EoaConfig(restarts=0).validate(2)
    with pytest.raises(ValueError):
        EoaConfig(max_ensemble=1).validate(2)
    assert EoaConfig().validate(3) == 9


def test_upper_bound_phi():
    assert eoa_upper_bound(make_phi()) == pytest.approx(2.0, abs=1e-9)


def test_eoa_phi_short_run_inside_window():
    res = eoa_optimize(make_phi(), ENTROPY, EoaConfig(restarts=2, seed=0))
    assert 1.9512050593046015 - 1e-3 <= res.value < 2.0
    assert abs(res.certificate.average(ENTROPY) - res.value) < 1e-9
    assert np.abs(res.certificate.reconstruct() - res.certificate.target.matrix).max() < 1e-8


def test_eoa_is_deterministic_and_nested():
    a = eoa_optimize(make_phi(), ENTROPY, EoaConfig(restarts=2, seed=3, refine_iters=50))
    b = eoa_optimize(make_phi(), ENTROPY, EoaConfig(restarts=3, seed=3, refine_iters=50))
    assert a.restart_values == b.restart_values[:2]
    assert b.value >= a.value - 1e-15


def test_eoa_threads_do_not_change_result():
    cfg = dict(restarts=3, seed=1, refine_iters=30)
    a = eoa_optimize(make_phi(), ENTROPY, EoaConfig(**cfg))
    b = eoa_optimize(make_phi(), ENTROPY, EoaConfig(threads=3, **cfg))
    assert a.restart_values == b.restart_values


def test_eoa_completely_mixed_two_qubits():
    rho = DensityOperator(PartySpace(("A", "B"), (2, 2)), np.eye(4) / 4)
    res = eoa_optimize(purify(rho), ENTROPY, EoaConfig(restarts=4, max_ensemble=4))
    assert res.value == pytest.approx(1.0, abs=1e-6)
    assert len(res.certificate) == 4


def test_eoa_product_is_zero():
    res = eoa_optimize(make_product([[1, 0], [0, 1], [1, 0]]), ENTROPY, EoaConfig(restarts=2))
    assert abs(res.value) <= 1e-9


def test_span_oracle_hand_values():
    assert np.allclose(span_deficit_oracle(1, 0), [0.3, 0.3, 0.2, 0.2])
    assert np.allclose(span_deficit_oracle(0, 1), [1 / 3, 1 / 3, 1 / 6, 1 / 6])


def test_eq6_printed_and_corrected_at_x1():
    assert np.allclose(eq6_printed(1, 0), [3 / 32, 3 / 16, 3 / 32, 3 / 16])
    assert np.allclose(eq6_corrected(1, 0), [1 / 8, 3 / 16, 1 / 8, 3 / 16])


@given(seeds)
def test_eq6_corrected_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    c = eq6_corrected(x, y)
    assert np.allclose(np.sort(c / c.sum())[::-1], span_deficit_oracle(x, y), atol=1e-12)


def test_vectorized_span_deficit_matches_oracle():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    y = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    d = span_deficit(x, y)
    for i in range(20):
        o = span_deficit_oracle(x[i], y[i])
        assert d[i] == pytest.approx(o.max() - o.min(), abs=1e-12)


def test_span_scan_regression_constant():
    res = span_scan(512, 400)
    assert res.min_deficit > 0
    assert res.min_deficit == pytest.approx(SPAN_MIN_DEFICIT, abs=1e-9)
    assert res.min_deficit <= res.grid_min


def test_ncopy_combo_normalization_and_vector():
    combo = NCopyCombo(np.array([1, 0, 0, 0]))
    v = combo.vector()
    assert v.shape == (64 * 16,)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert ncopy_lambda_analytic(combo).sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        NCopyCombo(np.zeros(4))
    with pytest.raises(ValueError):
        NCopyCombo(np.ones(4), n=3)


def test_u0_squared_deficit():
    assert float(ncopy_deficit(np.array([1, 0, 0, 0]))) == pytest.approx(0.05, abs=1e-12)


@given(seeds)
def test_eq7_matches_direct_schmidt(seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    combo = NCopyCombo(z)
    lam = ncopy_lambda_analytic(combo)
    assert lam.sum() == pytest.approx(1.0, abs=1e-12)
    direct = qmath.schmidt_spectrum(combo.vector(), 64, 16)
    assert np.allclose(np.sort(lam.ravel())[::-1], direct, atol=1e-9)
    assert np.allclose(lam, lambda_from_overlaps(combo.mu, combo.eta), atol=1e-12)


def test_equal_lambda_conditions_are_sufficient_and_necessary():
    mu = np.full((2, 4), 0.25)
    assert equal_lambda_conditions(mu, np.zeros(4))
    assert np.ptp(lambda_from_moments(mu, np.zeros(4))) < 1e-15
    for eta in (np.array([0.01, 0, 0, 0]), np.array([0, 0.01j, 0, 0])):
        assert np.ptp(lambda_from_moments(mu, eta)) > 1e-4
    skew = mu.copy()
    skew[0, 0], skew[1, 0] = 0.3, 0.2
    assert np.ptp(lambda_from_moments(skew, np.zeros(4))) > 1e-4


def test_ncopy_scan_regression():
    res = ncopy_deficit_scan(2, 10_000, 0)
    assert res.min_deficit > 0
    assert res.min_deficit == pytest.approx(0.04531909219654149, abs=1e-12)
    with pytest.raises(ValueError):
        ncopy_deficit_scan(3, 10)


def test_value_never_exceeds_upper_bound():
    for restarts in (1, 3):
        res = eoa_optimize(make_phi(), ENTROPY, EoaConfig(restarts=restarts, refine_iters=100))
        assert res.value <= res.upper_bound + 1e-8


@given(seeds)
def test_span_oracle_global_phase_invariance(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    assert np.allclose(span_deficit_oracle(x, y), span_deficit_oracle(phase * x, phase * y), atol=1e-14)


@given(seeds)
def test_refinement_never_lowers_average_entropy(seed):
    # rank-1 elements can only be refined into proportional pieces, which leaves
    # the ensemble members unchanged and splits their weights
    from eoakit.ensembles import Povm, ensemble_from_charlie_povm, random_povm

    rng = np.random.default_rng(seed)
    povm = random_povm(2, int(rng.integers(2, 5)), rng)
    t = rng.uniform(0.05, 0.95, size=len(povm))
    fine = Povm(tuple((f"{k}.{j}", e * (t[i] if j == 0 else 1 - t[i]))
                      for i, (k, e) in enumerate(povm.elements) for j in (0, 1)))
    coarse = ensemble_from_charlie_povm(make_phi(), povm).average(ENTROPY)
    refined = ensemble_from_charlie_povm(make_phi(), fine).average(ENTROPY)
    assert refined >= coarse - 1e-10
    assert refined == pytest.approx(coarse, abs=1e-10)
