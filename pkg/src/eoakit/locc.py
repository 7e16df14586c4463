"""Finite LOCC protocol trees and the two optimal collaboration protocols.

A protocol is an explicit tree: each step is one party's instrument, and
the child taken depends on the outcome. Every outcome is broadcast, so the
classical communication is the branching itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import qmath
from .measures import ENTROPY, Cut, MixedStateError, RootMeasure, cut_spectrum
from .states import DensityOperator, PureState

PRUNE = 1e-14
COMPLETENESS_TOL = 1e-9


MixedLeafError = MixedStateError


@dataclass(frozen=True, eq=False)
class Instrument:
    party: str
    operators: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        ops = tuple((str(k), np.array(m, dtype=complex)) for k, m in self.operators)
        if not ops:
            raise ValueError("instrument needs at least one Kraus operator")
        labels = [k for k, _ in ops]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate outcome labels in {labels}")
        d = ops[0][1].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for k, m in ops:
            if m.shape != (d, d):
                raise ValueError(f"Kraus operator {k!r} has shape {m.shape}, expected {(d, d)}")
            total += m.conj().T @ m
        err = np.abs(total - np.eye(d)).max()
        if err > COMPLETENESS_TOL:
            raise ValueError(f"instrument on {self.party} is incomplete: sum K^dag K off by {err:.3e}")
        object.__setattr__(self, "operators", ops)

    @property
    def labels(self) -> list[str]:
        return [k for k, _ in self.operators]

    @property
    def dim(self) -> int:
        return self.operators[0][1].shape[0]

    @classmethod
    def projective(cls, party: str, vectors: Sequence[np.ndarray], labels: Sequence[str]) -> "Instrument":
        ops = [(k, np.outer(v, np.conj(v))) for k, v in zip(labels, vectors)]
        return cls(party, tuple(ops))


@dataclass(frozen=True)
class Leaf:
    pass


@dataclass(frozen=True, eq=False)
class Step:
    instrument: Instrument
    children: dict[str, "Node"] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(self.instrument.labels) - set(self.children)
        if missing:
            raise ValueError(f"step on {self.instrument.party} has no child for outcomes {sorted(missing)}")
        extra = set(self.children) - set(self.instrument.labels)
        if extra:
            raise ValueError(f"children for unknown outcomes {sorted(extra)}")


Node = Union[Leaf, Step]


@dataclass(frozen=True, eq=False)
class Protocol:
    root: Node

    def depth(self) -> int:
        def d(node):
            return 0 if isinstance(node, Leaf) else 1 + max(d(c) for c in node.children.values())

        return d(self.root)


State = Union[PureState, DensityOperator]


@dataclass(frozen=True, eq=False)
class BranchOutcome:
    probability: float
    state: State
    transcript: tuple[str, ...] = ()


def apply_instrument(state: State, instrument: Instrument) -> list[BranchOutcome]:
    """One instrument step; branches below 1e-14 probability are dropped."""
    space = state.space
    axis = space.index(instrument.party)
    if space.dims[axis] != instrument.dim:
        raise ValueError(
            f"instrument acts on dimension {instrument.dim}, party {instrument.party} has {space.dims[axis]}"
        )
    raw = []
    for label, k in instrument.operators:
        if isinstance(state, PureState):
            out = qmath.apply_local(k, state.vector, space.dims, axis)
            p = float(np.vdot(out, out).real)
        else:
            out = qmath.apply_local_dm(k, state.matrix, space.dims, axis)
            p = float(np.trace(out).real)
        if p >= PRUNE:
            raw.append((label, p, out))
    total = sum(p for _, p, _ in raw)
    branches = []
    for label, p, out in raw:
        if isinstance(state, PureState):
            new = PureState(space, out / np.sqrt(p))
        else:
            new = DensityOperator(space, out / p)
        branches.append(BranchOutcome(p / total, new, (label,)))
    return branches


def run_protocol(initial: State, protocol: Protocol) -> list[BranchOutcome]:
    """All leaves of the protocol tree, sorted by transcript."""
    leaves: list[BranchOutcome] = []

    def walk(node: Node, prob: float, state: State, transcript: tuple[str, ...]):
        if isinstance(node, Leaf):
            leaves.append(BranchOutcome(prob, state, transcript))
            return
        for b in apply_instrument(state, node.instrument):
            label = b.transcript[0]
            walk(node.children[label], prob * b.probability, b.state, transcript + (label,))

    walk(protocol.root, 1.0, initial, ())
    leaves.sort(key=lambda b: b.transcript)
    return leaves


def _reduced(state: State, keep: Sequence[str]) -> np.ndarray:
    idx = state.space.indices(keep)
    if isinstance(state, PureState):
        return qmath.reduced_from_vector(state.vector, state.space.dims, idx)
    return qmath.partial_trace(state.matrix, state.space.dims, idx)


def average_final_entanglement(
    leaves: Sequence[BranchOutcome], cut: Cut = (("A",), ("B",)), measure: RootMeasure = ENTROPY
) -> float:
    return float(sum(b.probability * measure.of_spectrum(cut_spectrum(b.state, cut)) for b in leaves))


def _proj(dim: int, levels: Sequence[int]) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    for k in levels:
        p[k, k] = 1.0
    return p


_S = 1 / np.sqrt(2)


def collab_protocol_phi() -> Protocol:
    """Alice splits A into levels 0-3 / 4-7 and announces; Charlie then measures Z or Y."""
    charlie_z = Instrument.projective("C", [np.array([1, 0]), np.array([0, 1])], ["C0", "C1"])
    charlie_y = Instrument.projective("C", [np.array([_S, 1j * _S]), np.array([_S, -1j * _S])], ["C+i", "C-i"])
    alice = Instrument("A", (("A0", _proj(8, range(4))), ("A1", _proj(8, range(4, 8)))))
    return Protocol(
        Step(
            alice,
            {
                "A0": Step(charlie_z, {"C0": Leaf(), "C1": Leaf()}),
                "A1": Step(charlie_y, {"C+i": Leaf(), "C-i": Leaf()}),
            },
        )
    )


def collab_protocol_mixed() -> Protocol:
    """Alice splits A into levels 0-1 / 2-3 and announces; Charlie then measures Z or X."""
    charlie_z = Instrument.projective("C", [np.array([1, 0]), np.array([0, 1])], ["C0", "C1"])
    charlie_x = Instrument.projective("C", [np.array([_S, _S]), np.array([_S, -_S])], ["C+", "C-"])
    alice = Instrument("A", (("A0", _proj(4, [0, 1])), ("A1", _proj(4, [2, 3]))))
    return Protocol(
        Step(
            alice,
            {
                "A0": Step(charlie_z, {"C0": Leaf(), "C1": Leaf()}),
                "A1": Step(charlie_x, {"C+": Leaf(), "C-": Leaf()}),
            },
        )
    )


BUILTIN_PROTOCOLS = {"phi": collab_protocol_phi, "mixed": collab_protocol_mixed}

# Charlie's four states in the mixed example: |0>, |1>, |+>, |->
CHARLIE_STATES = np.array([[1, 0], [0, 1], [_S, _S], [_S, -_S]], dtype=complex)


def charlie_weights(element: np.ndarray) -> np.ndarray:
    """<c_i|E|c_i> for Charlie's four states."""
    e = np.asarray(element, dtype=complex)
    return np.real(np.einsum("ia,ab,ib->i", CHARLIE_STATES.conj(), e, CHARLIE_STATES))


def charlie_weight_support(element: np.ndarray, threshold: float = 1e-12) -> int:
    """How many of the four |phi_i> keep nonzero weight after Charlie sees outcome E."""
    e = np.asarray(element, dtype=complex)
    if e.shape != (2, 2):
        raise ValueError(f"expected a 2x2 element, got shape {e.shape}")
    if not qmath.is_hermitian(e) or np.linalg.eigvalsh(e).min() < -qmath.PSD_TOL:
        raise ValueError("POVM element must be PSD")
    if np.trace(e).real <= threshold:
        raise ValueError("POVM element is zero")
    return int(np.sum(charlie_weights(e) > threshold))


def charlie_outcome_state(state: State, element: np.ndarray, charlie: str = "C") -> DensityOperator:
    """Normalized state of the other parties after Charlie observes POVM outcome ``element``.

    Uses the instrument {sqrt(E), sqrt(I - E)} and keeps the first branch.
    """
    e = np.asarray(element, dtype=complex)
    w, v = qmath.hermitian_eig(e)
    w = qmath.clamp_spectrum(w)
    k = (v * np.sqrt(w)) @ v.conj().T
    rest = np.eye(len(w)) - e
    w2, v2 = qmath.hermitian_eig(rest)
    k2 = (v2 * np.sqrt(qmath.clamp_spectrum(w2))) @ v2.conj().T
    inst = Instrument(charlie, (("E", k), ("rest", k2)))
    for b in apply_instrument(state, inst):
        if b.transcript == ("E",):
            others = [x for x in state.space.labels if x != charlie]
            rho = _reduced(b.state, others)
            return DensityOperator(state.space.subspace(others), rho)
    raise ValueError("outcome has zero probability on this state")
