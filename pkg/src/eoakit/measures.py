"""Bipartite pure-state entanglement quantities.

A root measure here is any function of the squared Schmidt coefficients.
That covers every local-unitary-invariant pure-state measure, and it lets
the optimizers evaluate a measure on thousands of spectra at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qmath
from .states import DensityOperator, PureState

PURITY_TOL = 1e-9

Cut = tuple[tuple[str, ...], tuple[str, ...]]


def parse_cut(text: str, labels: Sequence[str] | None = None) -> Cut:
    """Parse ``"AB:C"`` into (("A", "B"), ("C",)).

    Multi-character party labels can be comma separated: ``"A1,A2:B"``.
    """
    if text.count(":") != 1:
        raise ValueError(f"cut must look like 'A:B', got {text!r}")
    sides = []
    for part in text.split(":"):
        part = part.strip()
        names = tuple(p for p in part.split(",") if p) if "," in part else tuple(part)
        if not names:
            raise ValueError(f"empty side in cut {text!r}")
        sides.append(names)
    left, right = sides
    if set(left) & set(right):
        raise ValueError(f"cut {text!r} lists a party on both sides")
    if labels is not None:
        unknown = set(left + right) - set(labels)
        if unknown:
            raise ValueError(f"cut {text!r} names unknown parties {sorted(unknown)}")
    return left, right


def _default_cut(psi: PureState) -> Cut:
    labels = psi.space.labels
    if len(labels) < 2:
        raise ValueError("need at least two parties for a bipartite cut")
    return (labels[:1], labels[1:])


class MixedStateError(ValueError):
    """The state restricted to the cut's parties is mixed, but the measure needs a pure state."""


def cut_spectrum(state: PureState | DensityOperator, cut: Cut) -> np.ndarray:
    """Schmidt probabilities across ``cut`` after tracing out every party not named in it.

    The restricted state must be pure (purity >= 1 - 1e-9).
    """
    left, right = cut
    space = state.space
    named = list(left) + list(right)
    idx = space.indices(named)
    if isinstance(state, PureState):
        red = lambda keep: qmath.reduced_from_vector(state.vector, space.dims, keep)  # noqa: E731
    else:
        red = lambda keep: qmath.partial_trace(state.matrix, space.dims, keep)  # noqa: E731
    pur = qmath.purity(red(idx))
    if pur < 1 - PURITY_TOL:
        raise MixedStateError(f"state on {''.join(named)} has purity {pur:.12g} < 1")
    dl, dr = space.dim_of(left), space.dim_of(right)
    smaller = left if dl <= dr else right
    w = qmath.clamp_spectrum(qmath.hermitian_eigvals(red(space.indices(smaller))))
    return w / w.sum()


def schmidt_probabilities(psi: PureState, cut: Cut | None = None) -> np.ndarray:
    """All min(dA, dB) squared Schmidt coefficients across ``cut``, zeros included."""
    left, right = cut or _default_cut(psi)
    m = psi.bipartite_matrix(left, right)
    da, db = m.shape
    return qmath.schmidt(m.reshape(-1), da, db).probabilities


def entropy_of_entanglement(psi: PureState, cut: Cut | None = None) -> float:
    return float(qmath.shannon_bits(schmidt_probabilities(psi, cut)))


def deficit_of_spectrum(p: np.ndarray) -> np.ndarray:
    """max - min of normalized Schmidt probabilities along the last axis."""
    p = np.asarray(p, dtype=float)
    p = p / np.sum(p, axis=-1, keepdims=True)
    return np.max(p, axis=-1) - np.min(p, axis=-1)


def max_ent_deficit(psi: PureState, cut: Cut | None = None) -> float:
    """Spread of the Schmidt probabilities; zero exactly for maximally entangled states.

    Zero probabilities count, so anything short of full Schmidt rank has a
    positive deficit.
    """
    return float(deficit_of_spectrum(schmidt_probabilities(psi, cut)))


def is_max_entangled(psi: PureState, cut: Cut | None = None, tol: float = 1e-9) -> bool:
    return max_ent_deficit(psi, cut) <= tol


@dataclass(frozen=True)
class RootMeasure:
    """Pure-state bipartite measure used inside assistance/collaboration averages.

    ``of_spectrum`` maps normalized Schmidt probabilities (last axis) to a
    nonnegative value and must broadcast over leading axes.
    """

    name: str
    of_spectrum: Callable[[np.ndarray], np.ndarray]
    mixed_capable: bool = False

    def evaluate(self, psi: PureState, cut: Cut | None = None) -> float:
        return float(self.of_spectrum(schmidt_probabilities(psi, cut)))

    def average(self, spectra: np.ndarray) -> np.ndarray:
        """Weighted average over ensembles of unnormalized spectra.

        ``spectra`` has shape (..., members, k); each member's weight is the
        sum of its spectrum. Members below 1e-14 weight contribute nothing.
        """
        spectra = np.asarray(spectra, dtype=float)
        weights = spectra.sum(axis=-1)
        live = weights > qmath.ZERO_PROB
        safe = np.where(live, weights, 1.0)
        vals = self.of_spectrum(spectra / safe[..., None])
        return np.sum(np.where(live, weights * vals, 0.0), axis=-1)


ENTROPY = RootMeasure("entropy", qmath.shannon_bits)

MEASURES: dict[str, RootMeasure] = {ENTROPY.name: ENTROPY}


def get_measure(name: str) -> RootMeasure:
    try:
        return MEASURES[name]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; available: {sorted(MEASURES)}") from None
