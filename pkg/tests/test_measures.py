import numpy as np
import pytest
from hypothesis import given, strategies as st

from eoakit import qmath
from eoakit.measures import (
    ENTROPY,
    MixedStateError,
    cut_spectrum,
    entropy_of_entanglement,
    get_measure,
    is_max_entangled,
    max_ent_deficit,
    parse_cut,
    schmidt_probabilities,
)
from eoakit.states import haar_state, make_bell, make_max_entangled, make_phi, make_product, make_u, PureState


def test_parse_cut():
    assert parse_cut("AB:C") == (("A", "B"), ("C",))
    assert parse_cut("A1,A2:B") == (("A1", "A2"), ("B",))
    for bad in ("AB", "A:A", ":B", "A:B:C"):
        with pytest.raises(ValueError):
            parse_cut(bad)
    with pytest.raises(ValueError):
        parse_cut("A:D", ["A", "B", "C"])


def test_known_entropies():
    assert entropy_of_entanglement(make_bell(0)) == pytest.approx(1.0, abs=1e-12)
    assert entropy_of_entanglement(make_max_entangled(8, 4)) == pytest.approx(2.0, abs=1e-12)
    assert entropy_of_entanglement(make_product([[1, 0], [0, 1]])) == pytest.approx(0.0, abs=1e-12)


def test_u_decomposition_entropy():
    s0 = PureState.from_vector(make_u(0), (8, 4), renormalize=True)
    s1 = PureState.from_vector(make_u(1), (8, 4), renormalize=True)
    avg = 5 / 8 * entropy_of_entanglement(s0) + 3 / 8 * entropy_of_entanglement(s1)
    assert avg == pytest.approx(1.9512050593046015, abs=1e-12)


def test_deficit():
    assert is_max_entangled(make_max_entangled(4, 4))
    assert max_ent_deficit(make_product([[1, 0], [1, 0]])) == pytest.approx(1.0)
    # a rank-deficient state counts the zero probability
    partial = PureState.from_vector(np.kron([1, 0, 0], [1, 0, 0]) + np.kron([0, 1, 0], [0, 1, 0]), (3, 3), renormalize=True)
    assert max_ent_deficit(partial) == pytest.approx(0.5)


def test_cut_spectrum_pure_and_mixed():
    phi = make_phi()
    p = cut_spectrum(phi, (("A", "B"), ("C",)))
    # u0 and u1 overlap, so the AB:C spectrum is that of their Gram matrix
    assert np.allclose(sorted(p), [0.5 - np.sqrt(2) / 8, 0.5 + np.sqrt(2) / 8])
    with pytest.raises(MixedStateError):
        cut_spectrum(phi, (("A",), ("B",)))
    p = cut_spectrum(phi.density(), (("A", "B"), ("C",)))
    assert p.sum() == pytest.approx(1.0)


@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    st_ = haar_state((3, 4), rng)
    u = np.kron(qmath.haar_unitary(3, rng), qmath.haar_unitary(4, rng))
    moved = PureState(st_.space, u @ st_.vector)
    assert np.allclose(schmidt_probabilities(st_), schmidt_probabilities(moved), atol=1e-10)
    assert abs(entropy_of_entanglement(st_) - entropy_of_entanglement(moved)) < 1e-9


@given(st.integers(0, 2**32 - 1))
def test_entropy_bounds(seed):
    rng = np.random.default_rng(seed)
    s = haar_state((2, 5), rng)
    e = entropy_of_entanglement(s)
    assert -1e-12 <= e <= 1 + 1e-12


def test_root_measure_average_skips_empty_members():
    spectra = np.array([[[0.25, 0.25], [0.5, 0.0], [0.0, 0.0]]])
    assert ENTROPY.average(spectra)[0] == pytest.approx(0.5)


def test_get_measure():
    assert get_measure("entropy") is ENTROPY
    with pytest.raises(ValueError):
        get_measure("concurrence")
