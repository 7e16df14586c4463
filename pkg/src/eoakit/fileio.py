"""JSON state, protocol and report files.

Complex numbers are stored as ``[re, im]`` pairs. Floats go through
``repr``, which prints the shortest string that parses back to the same
double (at most 17 significant digits), so a write/read round trip is
bit-exact.

State file::

    {"format": "eoakit-state", "labels": ["A", "B", "C"], "dims": [8, 4, 2],
     "kind": "pure", "amplitudes": [[re, im], ...]}

``kind: "mixed"`` carries ``"entries"`` instead: the density matrix as a flat
row-major list of pairs. Amplitude and entry order is the flat index order
with the first party varying slowest.

Protocol file: a node is ``{}`` (leaf) or
``{"party": "A", "operators": {label: [[[re, im], ...], ...]},
"children": {label: node}}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .locc import Instrument, Leaf, Node, Protocol, Step
from .states import DensityOperator, PartySpace, PureState

STATE_FORMAT = "eoakit-state"
PROTOCOL_FORMAT = "eoakit-protocol"


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def _complex(pairs: Any, what: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError(f"{what} must be a list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state: PureState | DensityOperator) -> dict:
    doc = {"format": STATE_FORMAT, "labels": list(state.space.labels), "dims": list(state.space.dims)}
    if isinstance(state, PureState):
        doc["kind"] = "pure"
        doc["amplitudes"] = _pairs(state.vector)
    else:
        doc["kind"] = "mixed"
        doc["entries"] = _pairs(state.matrix)
    return doc


def state_from_dict(doc: dict, *, renormalize: bool = False) -> PureState | DensityOperator:
    try:
        dims = [int(d) for d in doc["dims"]]
        kind = doc["kind"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"state document is missing a field: {exc}") from None
    labels = doc.get("labels") or [chr(ord("A") + i) for i in range(len(dims))]
    space = PartySpace(tuple(labels), tuple(dims))
    if kind == "pure":
        v = _complex(doc.get("amplitudes"), "amplitudes")
        if renormalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError("cannot renormalize the zero vector")
            v = v / n
        return PureState(space, v)
    if kind == "mixed":
        m = _complex(doc.get("entries"), "entries")
        d = space.total
        if m.size != d * d:
            raise ValueError(f"mixed state needs {d * d} entries, got {m.size}")
        m = m.reshape(d, d)
        if renormalize:
            m = m / np.trace(m).real
        return DensityOperator(space, m)
    raise ValueError(f"unknown state kind {kind!r}")


def write_state(path: str | Path, state: PureState | DensityOperator) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=1) + "\n")


def read_state(path: str | Path, *, renormalize: bool = False) -> PureState | DensityOperator:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return state_from_dict(doc, renormalize=renormalize)


def node_to_dict(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {}
    inst = node.instrument
    return {
        "party": inst.party,
        "operators": {k: [_pairs(row) for row in m] for k, m in inst.operators},
        "children": {k: node_to_dict(node.children[k]) for k in inst.labels},
    }


def node_from_dict(doc: dict) -> Node:
    if not isinstance(doc, dict):
        raise ValueError("protocol node must be an object")
    if not doc:
        return Leaf()
    try:
        party = doc["party"]
        ops = doc["operators"]
        children = doc.get("children", {})
    except KeyError as exc:
        raise ValueError(f"protocol step is missing {exc}") from None
    inst = Instrument(party, tuple((k, _complex(m, f"operator {k}")) for k, m in ops.items()))
    return Step(inst, {k: node_from_dict(v) for k, v in children.items()})


def protocol_to_dict(protocol: Protocol) -> dict:
    return {"format": PROTOCOL_FORMAT, "root": node_to_dict(protocol.root)}


def protocol_from_dict(doc: dict) -> Protocol:
    root = doc.get("root", doc) if isinstance(doc, dict) and "format" in doc else doc
    return Protocol(node_from_dict(root))


def write_protocol(path: str | Path, protocol: Protocol) -> None:
    Path(path).write_text(json.dumps(protocol_to_dict(protocol), indent=1) + "\n")


def read_protocol(path: str | Path) -> Protocol:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return protocol_from_dict(doc)
