import numpy as np
import pytest
from hypothesis import given, strategies as st

from eoakit import qmath
from eoakit.locc import (
    Instrument,
    Leaf,
    Protocol,
    Step,
    apply_instrument,
    average_final_entanglement,
    charlie_outcome_state,
    charlie_weight_support,
    collab_protocol_mixed,
    collab_protocol_phi,
    run_protocol,
)
from eoakit.measures import MixedStateError, cut_spectrum
from eoakit.states import DensityOperator, PartySpace, make_mixed_example, make_phi

AB = (("A",), ("B",))


def test_phi_protocol_gives_two_ebits_everywhere():
    leaves = run_protocol(make_phi(), collab_protocol_phi())
    assert len(leaves) == 4
    assert [b.transcript for b in leaves] == sorted(b.transcript for b in leaves)
    for b in leaves:
        assert b.probability == pytest.approx(0.25)
        assert np.allclose(cut_spectrum(b.state, AB), 0.25, atol=1e-12)
    assert average_final_entanglement(leaves, AB) == pytest.approx(2.0, abs=1e-9)


def test_mixed_protocol_leaves_are_pure_and_maximal():
    leaves = run_protocol(make_mixed_example(), collab_protocol_mixed())
    assert len(leaves) == 4
    for b in leaves:
        assert b.state.reduce(["A", "B"]).purity() > 1 - 1e-9
    assert average_final_entanglement(leaves, AB) == pytest.approx(1.0, abs=1e-9)


def test_mixed_leaf_is_rejected():
    alice = Instrument("A", (("all", np.eye(4)),))
    leaves = run_protocol(make_mixed_example(), Protocol(Step(alice, {"all": Leaf()})))
    with pytest.raises(MixedStateError):
        average_final_entanglement(leaves, AB)


def test_instrument_validation():
    with pytest.raises(ValueError):
        Instrument("A", (("0", np.diag([1, 0])),))
    with pytest.raises(ValueError):
        Instrument("A", (("0", np.eye(2)), ("0", np.zeros((2, 2)))))
    inst = Instrument("A", (("0", np.diag([1, 0])), ("1", np.diag([0, 1]))))
    with pytest.raises(ValueError):
        Step(inst, {"0": Leaf()})


def test_instrument_dimension_mismatch():
    inst = Instrument("C", (("0", np.eye(3)),))
    with pytest.raises(ValueError):
        apply_instrument(make_phi(), inst)


@given(st.integers(0, 2**32 - 1))
def test_instrument_preserves_trace(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 3, 2)
    rho = DensityOperator(PartySpace(("A", "B", "C"), dims), qmath.random_density(12, rng))
    k = qmath.random_isometry(9, 3, rng)
    inst = Instrument("B", (("0", k[:3]), ("1", k[3:6]), ("2", k[6:])))
    branches = apply_instrument(rho, inst)
    assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-12)
    avg = sum(b.probability * b.state.matrix for b in branches)
    channel = sum(qmath.apply_local_dm(m, rho.matrix, dims, 1) for _, m in inst.operators)
    assert np.abs(avg - channel).max() < 1e-9


def test_zero_probability_branches_are_pruned():
    inst = Instrument("A", (("lo", np.diag([1.0] * 4 + [0.0] * 4)), ("hi", np.diag([0.0] * 4 + [1.0] * 4))))
    from eoakit.states import make_product

    prod = make_product([np.eye(8)[0], np.eye(4)[0], np.eye(2)[0]])
    branches = apply_instrument(prod, inst)
    assert [b.transcript for b in branches] == [("lo",)]


def test_charlie_support():
    assert charlie_weight_support(np.diag([1.0, 0.0])) == 3
    assert charlie_weight_support(np.eye(2)) == 4
    with pytest.raises(ValueError):
        charlie_weight_support(np.diag([1.0, -0.5]))


def test_charlie_only_outcomes_stay_mixed():
    rho = make_mixed_example()
    s = charlie_outcome_state(rho, np.diag([1.0, 0.0]))
    assert s.space.labels == ("A", "B")
    assert s.purity() == pytest.approx(0.375, abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = qmath.haar_vector(2, rng)
        assert charlie_outcome_state(rho, np.outer(v, v.conj())).purity() <= 0.375 + 1e-9


def test_protocol_depth():
    assert collab_protocol_phi().depth() == 2
    assert Protocol(Leaf()).depth() == 0


def test_rank1_charlie_outcomes_on_a_bloch_grid():
    # every rank-1 element |v><v| up to scale, sampled densely over the sphere
    rho = make_mixed_example()
    worst = 0.0
    for theta in np.linspace(0, np.pi, 61):
        for phi in np.linspace(0, 2 * np.pi, 60, endpoint=False):
            v = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
            e = np.outer(v, v.conj())
            assert charlie_weight_support(e) >= 3
            worst = max(worst, charlie_outcome_state(rho, e).purity())
    assert worst == pytest.approx(0.375, abs=1e-12)
