"""Dense complex linear algebra for small multipartite systems.

Everything here works on plain numpy arrays. Multipartite vectors use the
flat index convention where the first-listed subsystem varies slowest, i.e.
the flat index of (a, b, c) is ``((a * dB) + b) * dC + c``; this is what
``np.kron`` and C-order ``reshape`` both produce.

The Hermitian eigensolver is a cyclic complex Jacobi iteration that runs over
a whole stack of matrices at once, so scans and optimizers can hand it
thousands of small reduced operators in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100
ZERO_PROB = 1e-14


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps did not drive the off-diagonal mass below tolerance."""


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors or two matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f))
    return out


def _check_dims(n: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be >= 1, got {dims}")
    if int(np.prod(dims)) != n:
        raise ValueError(f"dims {dims} do not multiply to {n}")
    return dims


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original order regardless of the order
    given in ``keep``.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    dims = _check_dims(rho.shape[0], dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep-set must be nonempty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # bra axes sit at offset n; trace them pairwise from the highest index down
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    dk = int(np.prod([dims[i] for i in keep]))
    return t.reshape(dk, dk)


def reduced_from_vector(psi: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density operator of a pure state without forming the full projector."""
    psi = np.asarray(psi)
    dims = _check_dims(psi.shape[-1], dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep-set must be nonempty")
    drop = [i for i in range(len(dims)) if i not in keep]
    t = psi.reshape(dims).transpose(keep + drop)
    dk = int(np.prod([dims[i] for i in keep]))
    m = t.reshape(dk, -1)
    return m @ m.conj().T


def apply_local(op: np.ndarray, psi: np.ndarray, dims: Sequence[int], axis: int) -> np.ndarray:
    """Apply ``op`` to subsystem ``axis`` of the vector ``psi``."""
    dims = _check_dims(psi.shape[-1], dims)
    op = np.asarray(op)
    if op.shape != (dims[axis], dims[axis]):
        raise ValueError(f"operator shape {op.shape} does not match subsystem dim {dims[axis]}")
    t = np.tensordot(op, psi.reshape(dims), axes=([1], [axis]))
    return np.moveaxis(t, 0, axis).reshape(-1)


def apply_local_dm(op: np.ndarray, rho: np.ndarray, dims: Sequence[int], axis: int) -> np.ndarray:
    """Return ``K rho K^dagger`` for ``K`` acting on subsystem ``axis``."""
    dims = _check_dims(rho.shape[0], dims)
    op = np.asarray(op)
    if op.shape != (dims[axis], dims[axis]):
        raise ValueError(f"operator shape {op.shape} does not match subsystem dim {dims[axis]}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    t = np.moveaxis(np.tensordot(t, op.conj(), axes=([n + axis], [1])), -1, n + axis)
    return t.reshape(rho.shape)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.all(np.abs(m - np.swapaxes(m, -1, -2).conj()) <= tol))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 rounds of disjoint (p, q) pairs covering every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi(a: np.ndarray, want_vectors: bool, tol: float, max_sweeps: int):
    """Cyclic Jacobi on a stack ``a`` of shape (batch, n, n).

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the n/2 disjoint rotations of a round are applied together.
    Matrices leave the working set as soon as they converge.
    """
    batch, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), (batch, n, n)).copy() if want_vectors else None
    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    if n == 1:
        return w, v
    mask = ~np.eye(n, dtype=bool)
    thresh = tol * np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))
    rounds = _round_robin(n)
    diag = np.arange(n)
    idx = np.arange(batch)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=1))
        done = off <= thresh
        if done.any():
            w[idx[done]] = np.real(np.diagonal(a[done], axis1=1, axis2=2))
            if want_vectors:
                v[idx[done]] = vw[done] if sweep else v[idx[done]]
            keep = ~done
            idx, a, thresh = idx[keep], a[keep], thresh[keep]
            if want_vectors and sweep:
                vw = vw[keep]
        if idx.size == 0:
            break
        if sweep == max_sweeps:
            raise EigenConvergenceError(
                f"off-diagonal norm {off.max():.3e} above tolerance after {max_sweeps} sweeps"
            )
        if want_vectors and sweep == 0:
            vw = v[idx].copy()
        for P, Q in rounds:
            apq = a[:, P, Q]
            r = np.abs(apq)
            active = r > 0.0
            safe_r = np.where(active, r, 1.0)
            phase = np.where(active, apq / safe_r, 1.0)
            zeta = (a[:, Q, Q].real - a[:, P, P].real) / (2.0 * safe_r)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(zeta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # U = D R with D_qq = conj(phase), block-diagonal over the round's pairs
            u = np.zeros_like(a)
            u[:, diag, diag] = 1.0
            ec = phase.conj()
            u[:, P, P] = c
            u[:, P, Q] = s
            u[:, Q, P] = -s * ec
            u[:, Q, Q] = c * ec
            a = np.swapaxes(u, 1, 2).conj() @ (a @ u)
            a[:, P, Q] = 0.0
            a[:, Q, P] = 0.0
            if want_vectors:
                vw = vw @ u
    return w, v


def _chunked_jacobi(a: np.ndarray, want_vectors: bool, tol: float, max_sweeps: int):
    n = a.shape[-1]
    step = max(64, 65536 // (n * n))
    if a.shape[0] <= step:
        return _jacobi(a, want_vectors, tol, max_sweeps)
    parts = [_jacobi(a[i : i + step], want_vectors, tol, max_sweeps) for i in range(0, a.shape[0], step)]
    w = np.concatenate([p[0] for p in parts])
    v = np.concatenate([p[1] for p in parts]) if want_vectors else None
    return w, v


def _prepare(m: np.ndarray, check: bool) -> tuple[np.ndarray, tuple[int, ...]]:
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if check and not is_hermitian(m):
        raise ValueError("matrix is not Hermitian within 1e-9")
    lead = m.shape[:-2]
    a = m.reshape((-1,) + m.shape[-2:])
    a = 0.5 * (a + np.swapaxes(a, -1, -2).conj())
    return a, lead


def hermitian_eig(
    m: np.ndarray,
    *,
    tol: float = OFFDIAG_TOL,
    max_sweeps: int = MAX_SWEEPS,
    check: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix (or a stack of them).

    Returns ``(w, V)`` with eigenvalues sorted descending and eigenvectors as
    the columns of ``V``, so ``m == V @ diag(w) @ V^dagger``.

    Raises ``ValueError`` for non-Hermitian input and
    ``EigenConvergenceError`` if ``max_sweeps`` sweeps are not enough.
    """
    a, lead = _prepare(m, check)
    n = a.shape[-1]
    w, v = _chunked_jacobi(a, True, tol, max_sweeps)
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(lead + (n,)), v.reshape(lead + (n, n))


def hermitian_eigvals(
    m: np.ndarray, *, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS, check: bool = True
) -> np.ndarray:
    """Eigenvalues only, sorted descending; skips eigenvector accumulation."""
    a, lead = _prepare(m, check)
    n = a.shape[-1]
    w, _ = _chunked_jacobi(a, False, tol, max_sweeps)
    w = -np.sort(-w, axis=1)
    return w.reshape(lead + (n,))


def clamp_spectrum(w: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero out round-off negatives; reject anything below ``-tol``."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -tol):
        raise ValueError(f"eigenvalue {w.min():.3e} below -{tol:g}: operator is not PSD")
    return np.where(w < 0, 0.0, w)


def shannon_bits(p: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 1.0)
    h = -np.sum(np.where(p > 0, p * np.log2(safe), 0.0), axis=-1)
    return np.maximum(h, 0.0)


def vn_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits."""
    w = clamp_spectrum(hermitian_eigvals(rho))
    return float(shannon_bits(w))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Squared Schmidt coefficients (descending, summing to 1) with the local bases.

    ``left`` and ``right`` hold one row per nonzero coefficient; ``norm_sq`` is
    the squared norm of the input before normalization.
    """

    probabilities: np.ndarray
    left: np.ndarray
    right: np.ndarray
    norm_sq: float = 1.0

    def reconstruct(self) -> np.ndarray:
        k = self.left.shape[0]
        sq = np.sqrt(self.probabilities[:k])
        return np.einsum("i,ia,ib->ab", sq, self.left, self.right).reshape(-1)


def schmidt(psi: np.ndarray, dim_a: int, dim_b: int, *, normalized: bool = True) -> SchmidtDecomposition:
    """Schmidt decomposition of a bipartite vector.

    With ``normalized=True`` the input must have unit norm within 1e-9;
    otherwise any nonzero vector is accepted and the probabilities are
    normalized by its squared norm.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dim_a * dim_b:
        raise ValueError(f"vector of length {psi.size} does not fit {dim_a}x{dim_b}")
    nrm = float(np.vdot(psi, psi).real)
    if nrm == 0.0:
        raise ValueError("zero vector has no Schmidt decomposition")
    if normalized and abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"vector norm^2 {nrm:.12g} is not 1; pass normalized=False")
    m = psi.reshape(dim_a, dim_b) / np.sqrt(nrm)
    if dim_a <= dim_b:
        w, vecs = hermitian_eig(m @ m.conj().T)
    else:
        w, vecs = hermitian_eig(m.conj().T @ m)
    w = clamp_spectrum(w)
    w = w / w.sum()
    keep = w > ZERO_PROB
    vecs = vecs[:, keep]
    sq = np.sqrt(w[keep])
    if dim_a <= dim_b:
        left = vecs.T
        right = (m.T @ vecs.conj()).T / sq[:, None]
    else:
        right = vecs.conj().T
        left = (m @ vecs).T / sq[:, None]
    return SchmidtDecomposition(w, left, right, nrm)


def schmidt_spectrum(psi: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Unnormalized squared Schmidt coefficients for a stack of vectors.

    ``psi`` has shape (..., dim_a * dim_b); the result has shape
    (..., min(dim_a, dim_b)), descending, summing to each vector's squared norm.
    """
    psi = np.asarray(psi, dtype=complex)
    lead = psi.shape[:-1]
    m = psi.reshape((-1, dim_a, dim_b))
    if dim_a <= dim_b:
        red = m @ np.swapaxes(m, 1, 2).conj()
    else:
        red = np.swapaxes(m, 1, 2).conj() @ m
    w = hermitian_eigvals(red, check=False)
    scale = np.maximum(1.0, np.real(np.trace(red, axis1=1, axis2=2)))
    w = np.where((w < 0) & (w >= -PSD_TOL * scale[:, None]), 0.0, w)
    return w.reshape(lead + (min(dim_a, dim_b),))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho, rho)))


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormalized columns of a complex Gaussian matrix (rows >= cols)."""
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)
