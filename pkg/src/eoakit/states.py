"""State containers over labeled parties, plus the catalog of concrete states.

Catalog amplitudes are written out term by term rather than generated by
runtime trigonometry, so each entry can be checked against the printed
expansion by eye.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath

NORM_TOL = 1e-9
TRACE_TOL = 1e-9
RANK_TOL = 1e-12

SQRT2 = np.sqrt(2.0)
# z = (1 + i)/sqrt(2)
Z = (1 + 1j) / SQRT2


@dataclass(frozen=True)
class PartySpace:
    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        dims = tuple(int(d) for d in self.dims)
        if len(labels) != len(dims):
            raise ValueError("labels and dims must have the same length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate party labels in {labels}")
        if any(d < 1 for d in dims):
            raise ValueError(f"party dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, dims: Sequence[int], labels: Sequence[str] | None = None) -> "PartySpace":
        if labels is None:
            labels = [chr(ord("A") + i) for i in range(len(dims))]
        return cls(tuple(labels), tuple(dims))

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"no party {label!r} in {self.labels}") from None

    def indices(self, labels: Sequence[str]) -> list[int]:
        return [self.index(x) for x in labels]

    def subspace(self, labels: Sequence[str]) -> "PartySpace":
        idx = sorted(self.indices(labels))
        return PartySpace(tuple(self.labels[i] for i in idx), tuple(self.dims[i] for i in idx))

    def dim_of(self, labels: Sequence[str]) -> int:
        return int(np.prod([self.dims[i] for i in self.indices(labels)]))


@dataclass(frozen=True, eq=False)
class PureState:
    space: PartySpace
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).reshape(-1)
        if v.size != self.space.total:
            raise ValueError(f"vector length {v.size} does not match dims {self.space.dims}")
        if not np.all(np.isfinite(v)):
            raise ValueError("state vector has non-finite amplitudes")
        nrm = float(np.vdot(v, v).real)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 {nrm:.12g} differs from 1 by more than {NORM_TOL:g}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @classmethod
    def from_vector(cls, vector, dims, labels=None, *, renormalize: bool = False) -> "PureState":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if renormalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError("cannot normalize the zero vector")
            v = v / n
        return cls(PartySpace.of(dims, labels), v)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.space.dims

    def density(self) -> "DensityOperator":
        return DensityOperator(self.space, np.outer(self.vector, self.vector.conj()))

    def reduce(self, keep: Sequence[str]) -> "DensityOperator":
        idx = self.space.indices(keep)
        rho = qmath.reduced_from_vector(self.vector, self.dims, idx)
        return DensityOperator(self.space.subspace(keep), rho)

    def bipartite_matrix(self, left: Sequence[str], right: Sequence[str]) -> np.ndarray:
        """Amplitudes as a dim(left) x dim(right) matrix; the cut must cover every party."""
        li, ri = self.space.indices(left), self.space.indices(right)
        if not li or not ri or set(li) & set(ri) or len(li) + len(ri) != len(self.dims):
            raise ValueError(f"invalid cut {tuple(left)}:{tuple(right)} for parties {self.space.labels}")
        t = self.vector.reshape(self.dims).transpose(li + ri)
        return t.reshape(self.space.dim_of(left), self.space.dim_of(right))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    space: PartySpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.space.total
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.space.dims}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        if not qmath.is_hermitian(m):
            raise ValueError("density matrix is not Hermitian within 1e-9")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr:.12g} differs from 1 by more than {TRACE_TOL:g}")
        # construction-time guard only; reported spectra come from qmath
        if np.linalg.eigvalsh(m).min() < -qmath.PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue below -1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, dims, labels=None) -> "DensityOperator":
        return cls(PartySpace.of(dims, labels), matrix)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.space.dims

    def reduce(self, keep: Sequence[str]) -> "DensityOperator":
        idx = self.space.indices(keep)
        return DensityOperator(self.space.subspace(keep), qmath.partial_trace(self.matrix, self.dims, idx))

    def purity(self) -> float:
        return qmath.purity(self.matrix)

    def spectrum(self) -> np.ndarray:
        return qmath.clamp_spectrum(qmath.hermitian_eigvals(self.matrix))

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.spectrum() > tol))


def basis(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


# |Phi>_ABC on 8 x 4 x 2, expanded over the computational basis of C.
# Each row is (a, b, amplitude with |0>_C, amplitude with |1>_C).
_PHI_TERMS = [
    (0, 0, 1 / 4, 1j / 4),
    (1, 1, 1 / 4, 1 / 4),
    (2, 2, 1 / 4, -1j / 4),
    (3, 3, 1 / 4, -1 / 4),
    (4, 0, Z / 4, Z / 4),
    (5, 1, SQRT2 / 4, 0.0),
    (6, 2, Z / 4, Z / 4),
    (7, 3, SQRT2 / 4, 0.0),
]

# Mixed 4 x 2 x 2 example: (|phi_i>_AB as {(a, b): amp}, Charlie's vector).
_S = 1 / SQRT2
_MIXED_TERMS = [
    ({(0, 1): _S, (1, 0): _S}, np.array([1.0, 0.0])),
    ({(0, 0): _S, (1, 1): _S}, np.array([0.0, 1.0])),
    ({(2, 1): _S, (3, 0): _S}, np.array([_S, _S])),
    ({(2, 0): _S, (3, 1): _S}, np.array([_S, -_S])),
]


def make_phi() -> PureState:
    """The 8 x 4 x 2 pure state whose collaboration value beats its assistance value."""
    v = np.zeros(64, dtype=complex)
    for a, b, c0, c1 in _PHI_TERMS:
        v[(a * 4 + b) * 2 + 0] = c0
        v[(a * 4 + b) * 2 + 1] = c1
    return PureState(PartySpace(("A", "B", "C"), (8, 4, 2)), v)


def make_u(b: int) -> np.ndarray:
    """Subnormalized 8 x 4 vector multiplying |b>_C in ``make_phi``."""
    if b not in (0, 1):
        raise ValueError(f"b must be 0 or 1, got {b!r}")
    u = np.zeros(32, dtype=complex)
    for a, k, c0, c1 in _PHI_TERMS:
        u[a * 4 + k] = c1 if b else c0
    return u


def c_vectors() -> np.ndarray:
    """The A-side vectors c_{b,k}, shape (2, 4, 8), with u_b = sum_k c_{b,k} (x) |k>."""
    return np.stack([make_u(b).reshape(8, 4).T for b in (0, 1)])


def mixed_example_components() -> list[tuple[np.ndarray, np.ndarray]]:
    """The four (|phi_i>_AB, |c_i>_C) pairs of the 4 x 2 x 2 mixed example."""
    out = []
    for terms, c in _MIXED_TERMS:
        phi = np.zeros(8, dtype=complex)
        for (a, b), amp in terms.items():
            phi[a * 2 + b] = amp
        out.append((phi, c.astype(complex)))
    return out


def make_mixed_example() -> DensityOperator:
    rho = np.zeros((16, 16), dtype=complex)
    for phi, c in mixed_example_components():
        v = np.kron(phi, c)
        rho += 0.25 * np.outer(v, v.conj())
    return DensityOperator(PartySpace(("A", "B", "C"), (4, 2, 2)), rho)


_BELL = {
    0: ({(0, 0): 1, (1, 1): 1}),
    1: ({(0, 0): 1, (1, 1): -1}),
    2: ({(0, 1): 1, (1, 0): 1}),
    3: ({(0, 1): 1, (1, 0): -1}),
}


def make_bell(k: int) -> PureState:
    """Bell states in the order Phi+, Phi-, Psi+, Psi-."""
    if k not in _BELL:
        raise ValueError(f"Bell index must be 0..3, got {k!r}")
    v = np.zeros(4, dtype=complex)
    for (a, b), s in _BELL[k].items():
        v[a * 2 + b] = s / SQRT2
    return PureState(PartySpace(("A", "B"), (2, 2)), v)


def make_max_entangled(dim_a: int, dim_b: int) -> PureState:
    """sum_k |k>|k> / sqrt(dim_b) on dim_a x dim_b (requires dim_b <= dim_a)."""
    if dim_b > dim_a:
        raise ValueError(f"need dim_b <= dim_a, got {dim_a}x{dim_b}")
    v = np.zeros(dim_a * dim_b, dtype=complex)
    for k in range(dim_b):
        v[k * dim_b + k] = 1.0 / np.sqrt(dim_b)
    return PureState(PartySpace(("A", "B"), (dim_a, dim_b)), v)


def make_product(vectors: Sequence[np.ndarray], labels: Sequence[str] | None = None) -> PureState:
    vecs = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in vectors]
    return PureState.from_vector(qmath.tensor_all(vecs), [len(v) for v in vecs], labels)


def purify(rho: DensityOperator, label: str = "C") -> PureState:
    """Eigen-purification sum_i sqrt(p_i) |v_i>|i>_C with dim C = rank(rho)."""
    w, vecs = qmath.hermitian_eig(rho.matrix)
    w = qmath.clamp_spectrum(w)
    keep = w > RANK_TOL
    w, vecs = w[keep], vecs[:, keep]
    w = w / w.sum()
    r = int(keep.sum())
    psi = (vecs * np.sqrt(w)[None, :]).reshape(-1)
    space = PartySpace(rho.space.labels + (label,), rho.space.dims + (r,))
    return PureState(space, psi)


def haar_state(dims: Sequence[int], rng: np.random.Generator, labels=None) -> PureState:
    return PureState.from_vector(qmath.haar_vector(int(np.prod(dims)), rng), dims, labels)


def catalog() -> dict[str, PureState | DensityOperator]:
    """Every named state the command line can export."""
    mixed2 = DensityOperator(PartySpace(("A", "B"), (2, 2)), np.eye(4) / 4)
    out: dict[str, PureState | DensityOperator] = {
        "phi": make_phi(),
        "mixed": make_mixed_example(),
        "maxent_8x4": make_max_entangled(8, 4),
        "maxent_4x2": make_max_entangled(4, 2),
        "u0": PureState.from_vector(make_u(0), (8, 4), renormalize=True),
        "u1": PureState.from_vector(make_u(1), (8, 4), renormalize=True),
        "mixed_2qubit": mixed2,
        "mixed_2qubit_purified": purify(mixed2),
        "product": make_product([[1, 0], [1, 0], [1, 0]]),
    }
    for k, name in enumerate(["bell", "bell_phi_minus", "bell_psi_plus", "bell_psi_minus"]):
        out[name] = make_bell(k)
    return out
