"""Pure-state decompositions of a bipartite density operator.

Every decomposition of rho = sum_j |u_j><u_j| has the form
|v_i> = sum_j V[i, j] |u_j> for an isometry V, and every rank-1 measurement
by the holder of a purification produces one of them. The functions below
move between those three descriptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath
from .states import DensityOperator, PartySpace, PureState

ZERO_WEIGHT = 1e-14
RECON_TOL = 1e-8
ISOMETRY_TOL = 1e-9
RANK1_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Ensemble:
    target: DensityOperator
    weights: np.ndarray
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.states):
            raise ValueError("one weight per state required")
        if np.any(w <= 0):
            raise ValueError("ensemble weights must be positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {w.sum():.12g}, not 1")
        err = np.abs(self.reconstruct() - self.target.matrix).max()
        if err > RECON_TOL:
            raise ValueError(f"ensemble misses its target by {err:.3e}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.weights, self.states))

    def reconstruct(self) -> np.ndarray:
        vecs = np.array([s.vector for s in self.states])
        return (vecs.T * self.weights) @ vecs.conj()

    def average(self, measure, cut=None) -> float:
        return float(sum(w * measure.evaluate(s, cut) for w, s in self))


@dataclass(frozen=True, eq=False)
class Isometry:
    matrix: np.ndarray

    def __post_init__(self):
        v = np.array(self.matrix, dtype=complex)
        if v.ndim != 2 or v.shape[0] < v.shape[1]:
            raise ValueError(f"isometry must be m x r with m >= r, got {v.shape}")
        err = np.abs(v.conj().T @ v - np.eye(v.shape[1])).max()
        if err > ISOMETRY_TOL:
            raise ValueError(f"V^dagger V differs from identity by {err:.3e}")
        object.__setattr__(self, "matrix", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        elems = tuple((str(k), np.array(e, dtype=complex)) for k, e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        labels = [k for k, _ in elems]
        if len(set(labels)) != len(labels):
            raise ValueError("POVM labels must be unique")
        d = elems[0][1].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for k, e in elems:
            if e.shape != (d, d):
                raise ValueError(f"element {k!r} has shape {e.shape}, expected {(d, d)}")
            if not qmath.is_hermitian(e):
                raise ValueError(f"element {k!r} is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -qmath.PSD_TOL:
                raise ValueError(f"element {k!r} is not PSD")
            total += e
        err = np.abs(total - np.eye(d)).max()
        if err > 1e-9:
            raise ValueError(f"POVM elements sum to identity only within {err:.3e}")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def from_basis(cls, vectors: Sequence[np.ndarray], labels: Sequence[str] | None = None) -> "Povm":
        labels = labels or [str(i) for i in range(len(vectors))]
        return cls(tuple((k, np.outer(v, np.conj(v))) for k, v in zip(labels, vectors)))

    @property
    def dim(self) -> int:
        return self.elements[0][1].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class CanonicalFamily:
    """Subnormalized vectors (one per row) whose projectors sum to ``density()``."""

    space: PartySpace
    vectors: np.ndarray

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    def density(self) -> DensityOperator:
        u = self.vectors
        return DensityOperator(self.space, u.T @ u.conj())


def canonical_vectors(rho: DensityOperator, given: Sequence[np.ndarray] | None = None) -> CanonicalFamily:
    """Eigen-family u_j = sqrt(p_j) v_j, or a caller-supplied family checked against ``rho``."""
    if given is not None:
        u = np.array([np.asarray(g, dtype=complex).reshape(-1) for g in given])
        err = np.abs(u.T @ u.conj() - rho.matrix).max()
        if err > 1e-9:
            raise ValueError(f"supplied vectors reproduce rho only within {err:.3e}")
        return CanonicalFamily(rho.space, u)
    w, vecs = qmath.hermitian_eig(rho.matrix)
    w = qmath.clamp_spectrum(w)
    keep = w > 1e-12
    u = (vecs[:, keep] * np.sqrt(w[keep])).T
    return CanonicalFamily(rho.space, u)


def ensemble_from_isometry(family: CanonicalFamily, v: Isometry | np.ndarray) -> Ensemble:
    if not isinstance(v, Isometry):
        v = Isometry(v)
    if v.shape[1] != family.rank:
        raise ValueError(f"isometry has {v.shape[1]} columns, family has rank {family.rank}")
    raw = v.matrix @ family.vectors
    weights = np.real(np.sum(raw * raw.conj(), axis=1))
    live = weights >= ZERO_WEIGHT
    states = tuple(PureState(family.space, raw[i] / np.sqrt(weights[i])) for i in np.flatnonzero(live))
    w = weights[live]
    return Ensemble(family.density(), w / w.sum(), states)


def _split_charlie(psi: PureState, charlie: str) -> tuple[np.ndarray, PartySpace]:
    ci = psi.space.index(charlie)
    rest = [x for x in psi.space.labels if x != charlie]
    if not rest:
        raise ValueError("state has no parties besides Charlie")
    m = psi.bipartite_matrix(rest, [charlie])
    return m, psi.space.subspace(rest)


def rank1_factor(element: np.ndarray) -> np.ndarray:
    """Vector w with element = |w><w|; raises if the element has rank above one."""
    w, vecs = qmath.hermitian_eig(element)
    if w.size > 1 and w[1] > RANK1_TOL:
        raise ValueError(f"POVM element has second eigenvalue {w[1]:.3e}; refine it first")
    return np.sqrt(max(w[0], 0.0)) * vecs[:, 0]


def ensemble_from_charlie_povm(psi: PureState, povm: Povm, charlie: str = "C") -> Ensemble:
    """Ensemble left on the other parties when Charlie measures a rank-1 POVM."""
    m, space = _split_charlie(psi, charlie)
    if povm.dim != m.shape[1]:
        raise ValueError(f"POVM acts on dimension {povm.dim}, Charlie holds {m.shape[1]}")
    raw = np.array([m @ rank1_factor(e).conj() for _, e in povm.elements])
    weights = np.real(np.sum(raw * raw.conj(), axis=1))
    live = weights >= ZERO_WEIGHT
    states = tuple(PureState(space, raw[i] / np.sqrt(weights[i])) for i in np.flatnonzero(live))
    target = DensityOperator(space, m @ m.conj().T)
    w = weights[live]
    return Ensemble(target, w / w.sum(), states)


def isometry_from_rank1_povm(povm: Povm) -> Isometry:
    """V[i, j] = conj(w_i[j]) for E_i = |w_i><w_i|.

    Against a purification written as sum_j |u_j>|j>_C this reproduces
    ``ensemble_from_charlie_povm`` through ``ensemble_from_isometry``.
    """
    return Isometry(np.array([rank1_factor(e).conj() for _, e in povm.elements]))


def refine_povm(povm: Povm) -> Povm:
    """Split every element along its eigenbasis into rank-1 pieces."""
    out = []
    for label, e in povm.elements:
        w, vecs = qmath.hermitian_eig(e)
        w = qmath.clamp_spectrum(w)
        for k in range(len(w)):
            if w[k] > ZERO_WEIGHT:
                out.append((f"{label}.{k}", w[k] * np.outer(vecs[:, k], vecs[:, k].conj())))
    return Povm(tuple(out))


def random_povm(dim: int, outcomes: int, rng: np.random.Generator, rank: int = 1) -> Povm:
    """Random POVM from a Naimark isometry; each element has rank <= ``rank``."""
    v = qmath.random_isometry(outcomes * rank, dim, rng)
    elems = []
    for i in range(outcomes):
        block = v[i * rank : (i + 1) * rank]
        elems.append((str(i), block.T @ block.conj()))
    return Povm(tuple(elems))


def span_residual(state: np.ndarray, family: CanonicalFamily) -> float:
    """Norm of the part of ``state`` outside span(family.vectors)."""
    q, _ = np.linalg.qr(family.vectors.T)
    s = np.asarray(state, dtype=complex).reshape(-1)
    return float(np.linalg.norm(s - q @ (q.conj().T @ s)))
