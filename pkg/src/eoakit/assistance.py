"""Entanglement of assistance: numerical lower bounds and the span arguments.

``eoa_optimize`` searches over decompositions of rho_AB (parameterized by
isometries acting on a fixed canonical family) for the largest average
root measure. The rest of the module checks, for the 8 x 4 x 2 state, that
no vector in span{u0, u1} (or in the span of the two-copy products
u_i (x) u_j) is maximally entangled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .ensembles import CanonicalFamily, Ensemble, canonical_vectors, ensemble_from_isometry
from .measures import ENTROPY, RootMeasure, deficit_of_spectrum
from .states import DensityOperator, PureState, c_vectors, make_u

STEP_START = 0.1
STEP_MIN = 1e-6


@dataclass
class EoaConfig:
    restarts: int = 16
    max_ensemble: int | None = None  # None -> rank**2
    seed: int = 0
    refine_iters: int = 2000
    threads: int = 1

    def validate(self, rank: int) -> int:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        m = rank * rank if self.max_ensemble is None else int(self.max_ensemble)
        if m < rank:
            raise ValueError(f"max_ensemble {m} is below the rank {rank} of rho_AB")
        return m


@dataclass
class EoaResult:
    value: float
    certificate: Ensemble
    restarts_used: int
    upper_bound: float
    restart_values: list[float] = field(default_factory=list)
    best_restart: int = 0


def _ab_family(source) -> CanonicalFamily:
    if isinstance(source, CanonicalFamily):
        return source
    if isinstance(source, PureState):
        labels = source.space.labels
        if len(labels) != 3:
            raise ValueError("expected a tripartite pure state (Charlie last)")
        return canonical_vectors(source.reduce(labels[:2]))
    if isinstance(source, DensityOperator):
        if len(source.space.labels) != 2:
            raise ValueError("expected a bipartite density operator rho_AB")
        return canonical_vectors(source)
    raise TypeError(f"cannot build a canonical family from {type(source).__name__}")


class _Objective:
    """Average root measure of the ensembles V @ U for a stack of isometries V."""

    def __init__(self, family: CanonicalFamily, measure: RootMeasure):
        if len(family.space.dims) != 2:
            raise ValueError("assistance needs a bipartite AB space")
        self.u = family.vectors
        self.da, self.db = family.space.dims
        self.measure = measure

    def __call__(self, vs: np.ndarray) -> np.ndarray:
        raw = vs @ self.u  # (T, m, d)
        spec = qmath.schmidt_spectrum(raw, self.da, self.db)
        return self.measure.average(np.maximum(spec, 0.0))


def _givens(vs: np.ndarray, j: int, k: int, kind: int, angle: float) -> np.ndarray:
    """exp(angle * G) @ vs for the anti-Hermitian generator G of (j, k, kind)."""
    c, s = np.cos(angle), np.sin(angle)
    out = vs.copy()
    rj, rk = vs[..., j, :], vs[..., k, :]
    if kind == 0:  # e_jk - e_kj
        out[..., j, :] = c * rj + s * rk
        out[..., k, :] = -s * rj + c * rk
    else:  # i (e_jk + e_kj)
        out[..., j, :] = c * rj + 1j * s * rk
        out[..., k, :] = 1j * s * rj + c * rk
    return out


def _compass(v: np.ndarray, f: _Objective, max_iters: int) -> tuple[np.ndarray, float]:
    """Poll every generator at +-step; move to the best improvement and double the step, else halve it."""
    m = v.shape[0]
    gens = [(j, k, kind) for j in range(m) for k in range(j + 1, m) for kind in (0, 1)]
    best = float(f(v[None])[0])
    if not gens:
        return v, best
    step = STEP_START
    for _ in range(max_iters):
        if step < STEP_MIN:
            break
        trials = np.stack([_givens(v, j, k, kind, sgn * step) for j, k, kind in gens for sgn in (1, -1)])
        vals = f(trials)
        i = int(np.argmax(vals))
        if vals[i] > best + 1e-15:
            v, best = trials[i], float(vals[i])
            step = min(2 * step, STEP_START)
        else:
            step *= 0.5
    return v, best


def _restart(k: int, seed: int, m: int, r: int, f: _Objective, iters: int):
    rng = np.random.default_rng([seed, k])
    v0 = qmath.random_isometry(m, r, rng)
    return _compass(v0, f, iters)


def eoa_optimize(source, measure: RootMeasure = ENTROPY, cfg: EoaConfig | None = None) -> EoaResult:
    """Best average root measure found over decompositions of rho_AB.

    ``source`` is a tripartite PureState (Charlie last) or a CanonicalFamily
    for rho_AB. The value is a certified lower bound: ``certificate`` is an
    ensemble for rho_AB attaining it. Restart ``k`` is seeded by
    ``(cfg.seed, k)``, so more restarts never lower the value.
    """
    cfg = cfg or EoaConfig()
    family = _ab_family(source)
    m = cfg.validate(family.rank)
    f = _Objective(family, measure)
    run = lambda k: _restart(k, cfg.seed, m, family.rank, f, cfg.refine_iters)  # noqa: E731
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(run, range(cfg.restarts)))
    else:
        results = [run(k) for k in range(cfg.restarts)]
    values = [val for _, val in results]
    best = int(np.argmax(values))  # first maximum = lowest restart index
    v = results[best][0]
    cert = ensemble_from_isometry(family, v)
    return EoaResult(
        value=cert.average(measure, (family.space.labels[:1], family.space.labels[1:])),
        certificate=cert,
        restarts_used=cfg.restarts,
        upper_bound=eoa_upper_bound(family),
        restart_values=values,
        best_restart=best,
    )


def eoa_upper_bound(source) -> float:
    """min(S(rho_A), S(rho_B)): no decomposition can average more entropy than either marginal."""
    rho = _ab_family(source).density()
    a, b = rho.space.labels
    return min(qmath.vn_entropy(rho.reduce([a]).matrix), qmath.vn_entropy(rho.reduce([b]).matrix))


# -- single-copy span of {u0, u1} ------------------------------------------


def _span_vectors(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return x[..., None] * make_u(0) + y[..., None] * make_u(1)


def span_deficit_oracle(x: complex, y: complex) -> np.ndarray:
    """Normalized Schmidt probabilities (descending) of x|u0> + y|u1> on 8 x 4."""
    if x == 0 and y == 0:
        raise ValueError("(x, y) must not both vanish")
    return qmath.schmidt(_span_vectors(x, y), 8, 4, normalized=False).probabilities


def span_deficit(x, y) -> np.ndarray:
    """Vectorized max - min of the normalized Schmidt probabilities of x|u0> + y|u1>."""
    return deficit_of_spectrum(qmath.schmidt_spectrum(_span_vectors(x, y), 8, 4))


def eq6_printed(x: complex, y: complex) -> np.ndarray:
    """The four coefficient magnitudes exactly as printed (unnormalized), with the 1/2 factors."""
    return np.array(
        [
            (abs(x + 1j * y) ** 2 + 0.5 * abs(x + y) ** 2) / 16,
            (abs(x + y) ** 2 + 2 * abs(x) ** 2) / 16,
            (abs(x - 1j * y) ** 2 + 0.5 * abs(x + y) ** 2) / 16,
            (abs(x - y) ** 2 + 2 * abs(x) ** 2) / 16,
        ]
    )


def eq6_corrected(x: complex, y: complex) -> np.ndarray:
    """Same four magnitudes with |z|^2 = 1 carried through (coefficient 1 on |x+y|^2)."""
    return np.array(
        [
            (abs(x + 1j * y) ** 2 + abs(x + y) ** 2) / 16,
            (abs(x + y) ** 2 + 2 * abs(x) ** 2) / 16,
            (abs(x - 1j * y) ** 2 + abs(x + y) ** 2) / 16,
            (abs(x - y) ** 2 + 2 * abs(x) ** 2) / 16,
        ]
    )


@dataclass
class SpanScanResult:
    min_deficit: float
    argmin: tuple[complex, complex]
    samples: int
    grid_min: float = float("nan")


def _xy(alpha, beta):
    return np.cos(alpha) + 0j, np.sin(alpha) * np.exp(1j * beta)


def span_scan(grid_points: int = 512, refine_iters: int = 400, threads: int = 1) -> SpanScanResult:
    """Minimize the deficit over x = cos a, y = sin a e^{ib}, a in [0, pi/2], b in [0, 2pi).

    A full grid is evaluated first, then compass search refines around the
    best cell. Ties go to the lowest flat grid index.
    """
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")
    alphas = np.linspace(0.0, np.pi / 2, grid_points)
    betas = np.linspace(0.0, 2 * np.pi, grid_points, endpoint=False)
    aa, bb = np.meshgrid(alphas, betas, indexing="ij")
    aa, bb = aa.ravel(), bb.ravel()
    chunks = np.array_split(np.arange(aa.size), max(1, threads))

    def block(ix):
        return span_deficit(*_xy(aa[ix], bb[ix]))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            d = np.concatenate(list(pool.map(block, chunks)))
    else:
        d = block(np.arange(aa.size))
    i = int(np.argmin(d))
    a, b, best = aa[i], bb[i], float(d[i])
    grid_min = best
    step = np.array([alphas[1] - alphas[0], betas[1] - betas[0]])
    dirs = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    evals = aa.size
    for _ in range(refine_iters):
        if step.max() < 1e-12:
            break
        cand = np.array([a, b]) + dirs * step
        cand[:, 0] = np.clip(cand[:, 0], 0.0, np.pi / 2)
        vals = span_deficit(*_xy(cand[:, 0], cand[:, 1]))
        evals += len(cand)
        j = int(np.argmin(vals))
        if vals[j] < best - 1e-16:
            (a, b), best = cand[j], float(vals[j])
        else:
            step = step * 0.5
    x, y = _xy(a, b)
    return SpanScanResult(best, (complex(x), complex(y)), evals, grid_min)


# -- two copies --------------------------------------------------------------


def _gram() -> np.ndarray:
    u = np.stack([make_u(0), make_u(1)])
    return u.conj() @ u.T


@dataclass(frozen=True, eq=False)
class NCopyCombo:
    """chi = sum_{i1,i2} coeffs[2*i1 + i2] |u_{i1}>|u_{i2}>, scaled so that ||chi|| = 1.

    The tables follow chi = |chi_0>|u_0> + |chi_1>|u_1> with
    chi_b = sum_s |alpha_{b,s}>|s>_{B1}: ``mu[b, s] = <alpha_bs|alpha_bs>`` and
    ``eta[s] = <alpha_0s|alpha_1s>``.
    """

    coeffs: np.ndarray
    n: int = 2

    def __post_init__(self):
        if self.n != 2:
            raise ValueError(f"only n = 2 is supported, got n = {self.n}")
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != 4:
            raise ValueError("n = 2 needs four coefficients")
        g = _gram()
        nrm = float(np.real(c.conj() @ np.kron(g, g) @ c))
        if nrm <= 0:
            raise ValueError("coefficients give the zero vector")
        object.__setattr__(self, "coeffs", c / np.sqrt(nrm))

    def alphas(self) -> np.ndarray:
        """alpha[b, s] as 8-vectors on A1, shape (2, 4, 8)."""
        cv = c_vectors()  # (i1, s, a1)
        c = self.coeffs.reshape(2, 2)  # (i1, b)
        return np.einsum("ib,isa->bsa", c, cv)

    @property
    def mu(self) -> np.ndarray:
        al = self.alphas()
        return np.real(np.sum(al * al.conj(), axis=-1))

    @property
    def eta(self) -> np.ndarray:
        al = self.alphas()
        return np.sum(al[0].conj() * al[1], axis=-1)

    def vector(self) -> np.ndarray:
        """chi on (A1 A2) x (B1 B2), flattened row-major: 64 x 16."""
        u = [make_u(0).reshape(8, 4), make_u(1).reshape(8, 4)]
        c = self.coeffs.reshape(2, 2)
        t = sum(c[i, j] * np.einsum("ab,cd->acbd", u[i], u[j]) for i in (0, 1) for j in (0, 1))
        return t.reshape(-1)


def lambda_from_moments(mu: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Schmidt table lambda[s, k] from mu[b, s] and eta[s] (coefficients as derived for u0, u1)."""
    mu = np.asarray(mu, dtype=float)
    eta = np.asarray(eta, dtype=complex)
    m0, m1 = mu[0], mu[1]
    return np.stack(
        [
            m0 / 8 + m1 / 8 + np.real((1 + 1j) * eta) / 8,
            3 * m0 / 16 + m1 / 16 + np.real(eta) / 8,
            m0 / 8 + m1 / 8 + np.real((1 - 1j) * eta) / 8,
            3 * m0 / 16 + m1 / 16 - np.real(eta) / 8,
        ],
        axis=-1,
    )


def lambda_from_overlaps(mu: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Generic form sum_b mu_bs <c_bk|c_bk> + 2 Re[eta_s <c_0k|c_1k>], overlaps computed numerically."""
    cv = c_vectors()
    norms = np.real(np.sum(cv * cv.conj(), axis=-1))  # (b, k)
    cross = np.sum(cv[0].conj() * cv[1], axis=-1)  # (k,)
    mu = np.asarray(mu, dtype=float)
    eta = np.asarray(eta, dtype=complex)
    return mu[0][:, None] * norms[0] + mu[1][:, None] * norms[1] + 2 * np.real(eta[:, None] * cross[None, :])


def ncopy_lambda_analytic(combo: NCopyCombo) -> np.ndarray:
    """4 x 4 table lambda[s, k] for the two-copy combination."""
    if combo.n != 2:
        raise ValueError("only n = 2 is supported")
    return lambda_from_moments(combo.mu, combo.eta)


def equal_lambda_conditions(mu: np.ndarray, eta: np.ndarray, tol: float = 1e-12) -> bool:
    """eta_s = 0, mu_0s = mu_1s for every s, and mu constant across s."""
    mu = np.asarray(mu, dtype=float)
    eta = np.asarray(eta, dtype=complex)
    return bool(
        np.all(np.abs(eta) <= tol)
        and np.all(np.abs(mu[0] - mu[1]) <= tol)
        and np.ptp(mu[0]) <= tol
        and np.ptp(mu[1]) <= tol
    )


@dataclass
class NCopyScanResult:
    min_deficit: float
    argmin: np.ndarray
    samples: int


def ncopy_deficit(coeffs: np.ndarray) -> np.ndarray:
    """Deficit of the normalized two-copy combination(s); ``coeffs`` has shape (..., 4)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    u = np.stack([make_u(0).reshape(8, 4), make_u(1).reshape(8, 4)])
    pairs = np.einsum("iab,jcd->ijacbd", u, u).reshape(4, 64 * 16)
    chi = coeffs @ pairs
    return deficit_of_spectrum(qmath.schmidt_spectrum(chi, 64, 16))


def ncopy_deficit_scan(n: int = 2, samples: int = 10_000, seed: int = 0, batch: int = 2048) -> NCopyScanResult:
    """Smallest deficit over random unit coefficient vectors in C^4."""
    if n != 2:
        raise ValueError(f"only n = 2 is supported, got n = {n}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((samples, 4)) + 1j * rng.standard_normal((samples, 4))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    d = np.concatenate([ncopy_deficit(z[i : i + batch]) for i in range(0, samples, batch)])
    i = int(np.argmin(d))
    return NCopyScanResult(float(d[i]), z[i], samples)
