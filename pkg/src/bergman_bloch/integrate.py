"""Measures on the ball and sphere, Monte Carlo estimators and radial quadrature.

Random numbers come from a Philox (counter-based) generator keyed by
``(seed, chunk index)`` with a fixed chunk size, so each sample depends only
on the seed and its index. Chunks are reduced in index order, which makes
every estimate bit-identical for any worker count.
"""

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ballgeom
from .specfun import ConvergenceError, DomainError, gamma_ratio, log_gamma

CHUNK_SIZE = 1 << 14
WORKERS_ENV = "BERGMAN_BLOCH_WORKERS"
_U64 = (1 << 64) - 1


class NonFiniteSampleError(ArithmeticError):
    """An integrand returned NaN or infinity on a Monte Carlo sample."""


class QuadratureError(ConvergenceError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved error {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class Params:
    """Complex dimension ``n``, derivative order ``N`` and weight ``alpha``."""

    n: int
    N: int
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("n", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or not float(v).is_integer() or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        a = float(self.alpha)
        if not math.isfinite(a) or a <= -1.0:
            raise DomainError(f"alpha must be > -1, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def c_alpha(self):
        """Normalising constant making v_alpha a probability measure."""
        return gamma_ratio((self.n + self.alpha + 1.0,), (self.n + 1.0, self.alpha + 1.0))

    @property
    def lam(self):
        return 0.5 * (self.n - self.N + self.alpha + 1.0)

    @property
    def kernel_exponent(self):
        return self.n + 1.0 + self.alpha

    def deriv_factor(self, order):
        """Gamma(n+1+alpha+order) / Gamma(n+1+alpha)."""
        s = self.kernel_exponent
        return math.exp(log_gamma(s + order) - log_gamma(s))

    def as_dict(self):
        return {"n": self.n, "N": self.N, "alpha": self.alpha}


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo settings.

    ``radial="beta"`` draws |z|^2 from Beta(n, alpha+1) so samples follow
    v_alpha exactly; ``"uniform"`` samples normalised volume and reweights.
    """

    samples: int = 10**6
    seed: int = 0
    workers: int = field(default_factory=default_workers)
    radial: str = "uniform"

    def __post_init__(self):
        if int(self.samples) < 2:
            raise DomainError("need at least 2 samples")
        if int(self.workers) < 1:
            raise DomainError("workers must be positive")
        if self.radial not in ("uniform", "beta"):
            raise DomainError(f"unknown radial law {self.radial!r}")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "workers", int(self.workers))

    def with_seed(self, seed):
        return MCConfig(self.samples, seed, self.workers, self.radial)

    def as_dict(self):
        return {
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
            "radial": self.radial,
        }


@dataclass(frozen=True)
class MCEstimate:
    value: complex
    stderr: float
    samples: int
    seed: int

    def __post_init__(self):
        if not (np.isfinite(self.value) and math.isfinite(self.stderr)):
            raise NonFiniteSampleError("estimate is not finite")

    def modulus(self):
        """|value| with the same standard error (to first order)."""
        return MCEstimate(abs(self.value), self.stderr, self.samples, self.seed)

    def scaled(self, c):
        return MCEstimate(self.value * c, self.stderr * abs(c), self.samples, self.seed)

    def zscore(self, target):
        if self.stderr == 0.0:
            return 0.0 if self.value == target else math.inf
        return abs(self.value - target) / self.stderr


def derive_seed(seed, index):
    """Independent 64-bit child seed for row ``index`` of a sweep."""
    ss = np.random.SeedSequence(int(seed) & _U64, spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def chunk_rng(seed, chunk):
    key = np.array([int(seed) & _U64, int(chunk)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _directions(n, rng, size):
    g = rng.standard_normal((size, 2 * n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return g[:, 0::2] + 1j * g[:, 1::2]


def sample_sphere(n, rng, size=None):
    """Points uniform for the normalised surface measure sigma."""
    pts = _directions(n, rng, 1 if size is None else size)
    return pts[0] if size is None else pts


def sample_ball_gap(n, rng, size, radial="uniform", alpha=0.0):
    """Ball samples together with ``1 - |z|^2`` computed without cancellation."""
    dirs = _directions(n, rng, size)
    if radial == "beta":
        x = rng.standard_gamma(n, size)
        y = rng.standard_gamma(alpha + 1.0, size)
        r2 = x / (x + y)
        gap = y / (x + y)
    else:
        logu = np.log(rng.random(size))
        r2 = np.exp(logu / n)
        gap = -np.expm1(logu / n)
    return dirs * np.sqrt(r2)[:, None], gap


def sample_ball(n, rng, size=None):
    """Points uniform for the normalised volume measure v."""
    pts, _ = sample_ball_gap(n, rng, 1 if size is None else size)
    return pts[0] if size is None else pts


def reduce_chunks(evaluate, samples, workers):
    """Mean and summed squared deviation of ``evaluate`` over all chunks.

    ``evaluate(chunk, size)`` returns a ``(size, q)`` array. Partial results
    are merged in chunk order with Chan's update.
    """
    nchunks = -(-samples // CHUNK_SIZE)
    sizes = [min(CHUNK_SIZE, samples - c * CHUNK_SIZE) for c in range(nchunks)]

    def run(c):
        vals = evaluate(c, sizes[c])
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSampleError(f"non-finite integrand value in chunk {c}")
        mean = vals.mean(axis=0)
        m2 = (np.abs(vals - mean) ** 2).sum(axis=0)
        return mean, m2, vals.shape[0]

    if workers > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(nchunks)))
    else:
        parts = [run(c) for c in range(nchunks)]

    mean, m2, count = parts[0]
    for mb, m2b, nb in parts[1:]:
        total = count + nb
        delta = mb - mean
        mean = mean + delta * (nb / total)
        m2 = m2 + m2b + np.abs(delta) ** 2 * (count * nb / total)
        count = total
    return mean, m2, count


def chunk_estimates(mean, m2, count, seed, real):
    out = []
    for mu, s2 in zip(np.atleast_1d(mean), np.atleast_1d(m2)):
        err = math.sqrt(s2 / (count - 1) / count)
        value = float(mu.real) if real else complex(mu)
        out.append(MCEstimate(value, err, count, seed))
    return out


def _as_columns(vals):
    vals = np.asarray(vals)
    return vals[:, None] if vals.ndim == 1 else vals


def mc_ball_mean(f, n, cfg):
    """Estimate ``int_B f dv`` (normalised volume) for each output column.

    ``f(Z, gap)`` receives a ``(k, n)`` batch and ``gap = 1 - |Z|^2``.
    """

    def evaluate(c, size):
        Z, gap = sample_ball_gap(n, chunk_rng(cfg.seed, c), size)
        return _as_columns(f(Z, gap))

    mean, m2, count = reduce_chunks(evaluate, cfg.samples, cfg.workers)
    return chunk_estimates(mean, m2, count, cfg.seed, np.isrealobj(mean))


def mc_sphere_mean(f, n, cfg):
    """Estimate ``int_S f dsigma`` for each output column of ``f(Z)``."""

    def evaluate(c, size):
        return _as_columns(f(_directions(n, chunk_rng(cfg.seed, c), size)))

    mean, m2, count = reduce_chunks(evaluate, cfg.samples, cfg.workers)
    return chunk_estimates(mean, m2, count, cfg.seed, np.isrealobj(mean))


def mc_integrals_valpha(f, params, cfg, center=None):
    """Estimate ``int_B f dv_alpha`` for every column of ``f(W)``.

    With ``center`` set, samples are pushed through the automorphism
    ``phi_center`` and reweighted by its Jacobian. The estimate is unbiased
    either way; recentring concentrates samples near ``center`` and removes
    the variance blow-up of kernels peaked there.
    """
    n, alpha = params.n, params.alpha
    c_alpha = params.c_alpha
    if center is not None:
        center = ballgeom.ball_point(center)
        if center.shape[0] != n:
            raise ValueError("center has the wrong dimension")
        c_gap = 1.0 - float(np.vdot(center, center).real)

    def evaluate(c, size):
        omega, gap = sample_ball_gap(n, chunk_rng(cfg.seed, c), size, cfg.radial, alpha)
        if center is None:
            W = omega
            weight = c_alpha * gap**alpha if cfg.radial == "uniform" else np.ones(size)
        else:
            W = ballgeom.involution(center, omega)
            q = c_gap / np.abs(1.0 - omega @ center.conj()) ** 2
            if cfg.radial == "uniform":
                weight = c_alpha * (q * gap) ** alpha * q ** (n + 1)
            else:
                weight = q ** (n + 1 + alpha)
        return _as_columns(f(W)) * weight[:, None]

    mean, m2, count = reduce_chunks(evaluate, cfg.samples, cfg.workers)
    return chunk_estimates(mean, m2, count, cfg.seed, np.isrealobj(mean))


def mc_integral_valpha(f, params, cfg, center=None):
    """Single-output form of :func:`mc_integrals_valpha`."""
    est = mc_integrals_valpha(f, params, cfg, center)
    if len(est) != 1:
        raise ValueError("integrand returned several columns; use mc_integrals_valpha")
    return est[0]


_GL_CACHE = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def adaptive_gauss_legendre(f, a, b, abs_tol=1e-10, rel_tol=1e-10, max_nodes=10**5):
    """Integrate a vectorised ``f`` over [a, b] by bisection.

    Each panel is integrated with 15- and 31-point rules; their difference is
    the panel error. The panel with the largest error is split until the
    summed error meets ``max(abs_tol, rel_tol * |I|)``.
    """
    x15, w15 = _gauss_legendre(15)
    x31, w31 = _gauss_legendre(31)

    def panel(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        coarse = half * np.dot(w15, f(mid + half * x15))
        fine = half * np.dot(w31, f(mid + half * x31))
        return fine, abs(fine - coarse)

    value, err = panel(a, b)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    nodes = 46
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if nodes + 92 > max_nodes:
            raise QuadratureError("adaptive Gauss-Legendre hit the node limit", total_err)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        left, el = panel(lo, mid)
        right, er = panel(mid, hi)
        nodes += 92
        heapq.heappush(heap, (-el, lo, mid, left))
        heapq.heappush(heap, (-er, mid, hi, right))
        total += left + right - val
        total_err += el + er + neg_err
    # re-add to shed accumulated rounding from the running updates
    return math.fsum(item[3] for item in heap)


def polar_integral(profile, params, tol=1e-10, max_nodes=10**5):
    """``c_alpha * 2n * int_0^1 r^(2n-1) (1-r^2)^alpha profile(r) dr``.

    With ``1 - r^2 = v^(1/(1+alpha))`` the weight ``(1-r^2)^alpha`` is absorbed
    into the Jacobian, so the quadrature sees a bounded integrand even for
    ``-1 < alpha < 0``.
    """
    n, alpha = params.n, params.alpha
    beta = 1.0 / (1.0 + alpha)

    def integrand(v):
        r2 = -np.expm1(beta * np.log(v))
        return r2 ** (n - 1) * np.asarray(profile(np.sqrt(r2)), dtype=float)

    inner = adaptive_gauss_legendre(integrand, 0.0, 1.0, tol, tol, max_nodes)
    return params.c_alpha * n * beta * inner


def _check_multi(m, n):
    m = tuple(int(x) for x in m)
    if len(m) != n or any(x < 0 for x in m):
        raise ValueError(f"multi-index {m} does not fit dimension {n}")
    return m


def sphere_monomial_integral(m, n):
    """Closed form of ``int_S |zeta^m| dsigma``."""
    m = _check_multi(m, n)
    num = [float(n)] + [1.0 + mi / 2.0 for mi in m]
    return gamma_ratio(num, (n + sum(m) / 2.0,))


def ball_monomial_integral(m, params):
    """Closed form of ``int_B |z^m| dv_alpha``."""
    m = _check_multi(m, params.n)
    s = 1.0 + params.alpha + params.n
    return gamma_ratio([s] + [1.0 + mi / 2.0 for mi in m], (s + sum(m) / 2.0,))


def abs_monomial(W, m):
    out = np.ones(W.shape[0])
    for i, mi in enumerate(m):
        if mi:
            out = out * np.abs(W[:, i]) ** mi
    return out
