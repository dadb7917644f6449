"""Closed-form operator norms of P_alpha and the numerical routes to them.

The Bloch semi-norm of ``P_alpha g`` is bounded by the radial majorant

    M(r) = Gamma(n+N+alpha+1)/Gamma(n+alpha+1) * 2F1(lam, lam; n+alpha+1; r^2),
    lam = (n - N + alpha + 1) / 2,

whose value at r = 1 is the exact semi-norm operator norm. The sweeps below
approach that value from inside the ball with unimodular test functions.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ballgeom
from .bergman import (
    extremal_g,
    extremal_g_delta,
    leading_index,
    multi_indices,
    multi_indices_upto,
    project_deriv,
    project_derivs,
)
from .integrate import (
    MCConfig,
    MCEstimate,
    Params,
    abs_monomial,
    chunk_estimates,
    chunk_rng,
    derive_seed,
    mc_integral_valpha,
    reduce_chunks,
    sample_ball_gap,
    sample_sphere,
)
from .specfun import DomainError, gamma_ratio, hyp2f1, hyp2f1_at_one, log_gamma

ROUTES = ("hypergeometric", "series", "extremal_sweep", "mc_sup")
DEFAULT_RADII = (0.9, 0.99, 0.999)
DEFAULT_DELTA = 0.99


@dataclass
class NormReport:
    params: Params
    closed_form: float
    numeric: object
    route: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.closed_form > 0:
            raise ValueError("closed_form must be positive")
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")


@dataclass
class SweepRow:
    r: float
    estimate: MCEstimate
    closed_form_target: float
    first_term: Optional[MCEstimate] = None
    first_term_target: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise ValueError("r must lie in [0, 1)")

    @property
    def ratio(self):
        return self.estimate.value / self.closed_form_target


def radial_majorant(params, r, tol=1e-12):
    """M(r); depends on z only through r = |z| (unitary invariance)."""
    if not 0.0 <= r <= 1.0:
        raise DomainError("r must lie in [0, 1]")
    lam, c = params.lam, params.n + params.alpha + 1.0
    factor = params.deriv_factor(params.N)
    if r == 1.0:
        return factor * hyp2f1_at_one(lam, lam, c)
    return factor * hyp2f1(lam, lam, c, r * r, tol=tol)


def radial_majorant_series(params, r, kmax):
    """Truncated power series for M(r), summed independently of ``hyp2f1``.

    Coefficients are built from ``(lam)_k^2 / (k! (n+alpha+1)_k)`` by
    cumulative products, so ``lam <= 0`` is handled exactly.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not 0.0 <= r < 1.0:
        raise DomainError("series route needs r in [0, 1)")
    lam, c = params.lam, params.n + params.alpha + 1.0
    k = np.arange(kmax, dtype=float)
    ratios = (lam + k) ** 2 / ((k + 1.0) * (c + k)) * (r * r)
    terms = np.concatenate(([1.0], np.cumprod(ratios)))
    return params.deriv_factor(params.N) * math.fsum(terms)


def seminorm_opnorm(params):
    """Exact norm of P_alpha into the Bloch space with the semi-norm."""
    n, N, a = params.n, params.N, params.alpha
    half = 0.5 * N + 0.5 * (n + a + 1.0)
    return gamma_ratio((n + N + a + 1.0, float(N)), (half, half))


def first_term(params):
    """Max over |m| <= N-1 of ``Gamma(|m|+n+alpha+1) int |w^m| dv_alpha / Gamma(n+alpha+1)``.

    This is the sharp bound on the derivatives at the origin. Returns
    ``(value, argmax)``.
    """
    n, a = params.n, params.alpha
    best, arg = -math.inf, None
    for m in multi_indices_upto(n, params.N - 1):
        k = sum(m)
        logv = (
            log_gamma(k + n + a + 1.0)
            - log_gamma(k / 2.0 + n + a + 1.0)
            + sum(log_gamma(1.0 + mi / 2.0) for mi in m)
        )
        if logv > best + 1e-14:
            best, arg = logv, m
    return math.exp(best), arg


def first_term_as_stated(params):
    """``Gamma(n+N+alpha+1) Gamma((1+N)/2) / Gamma((1+N)/2+alpha+n)``."""
    n, N, a = params.n, params.N, params.alpha
    h = 0.5 * (1.0 + N)
    return gamma_ratio((n + N + a + 1.0, h), (h + a + n,))


def bloch_opnorm(params, as_stated=False):
    """Norm of P_alpha into the Bloch space with the full norm.

    ``as_stated=True`` uses :func:`first_term_as_stated`; the default uses the
    sharp first term from :func:`first_term`.
    """
    head = first_term_as_stated(params) if as_stated else first_term(params)[0]
    return head + seminorm_opnorm(params)


def bloch_opnorm_lower(params):
    """Gamma(N+n+alpha+1)/Gamma(n+alpha+1), from conjugate-phase test functions."""
    return params.deriv_factor(params.N)


def monomial_sphere_max(m):
    """max over the unit sphere of |zeta^m|."""
    m = tuple(int(x) for x in m)
    k = sum(m)
    if k < 1:
        raise ValueError("need |m| >= 1")
    return math.prod((mi / k) ** (mi / 2.0) for mi in m if mi)


def lp_seminorm_opnorm_bound(params, p):
    """Upper bound for P_alpha when the N-th derivatives are combined in l^p."""
    if p < 1:
        raise DomainError("p must be >= 1")
    maxima = [monomial_sphere_max(m) for m in multi_indices(params.n, params.N)]
    if math.isinf(p):
        agg = max(maxima)
    else:
        agg = math.fsum(x**p for x in maxima) ** (1.0 / p)
    return seminorm_opnorm(params) * agg


def _probe_points(n, radii, directions, seed):
    rng = np.random.default_rng(derive_seed(seed, 1 << 40))
    dirs = [ballgeom.basis(n)]
    if directions > 0:
        dirs.extend(sample_sphere(n, rng, directions))
    return [(r, d) for r in radii for d in dirs]


def bloch_seminorm_estimate(params, g, grid=DEFAULT_RADII, directions=4, cfg=None):
    """Sup of ``(1-|z|^2)^N |d^N P_alpha g / dz^m (z)|`` over probe points.

    Probes every radius in ``grid`` along ``e_1`` and ``directions`` random
    directions, and every multi-index of order N. Each probe is estimated by
    recentred Monte Carlo at that point.
    """
    cfg = cfg or MCConfig()
    ms = multi_indices(params.n, params.N)
    best = None
    for i, (r, d) in enumerate(_probe_points(params.n, grid, directions, cfg.seed)):
        if not 0.0 <= r < 1.0:
            raise DomainError("grid radii must lie in [0, 1)")
        z = r * d
        scale = (1.0 - r * r) ** params.N
        ests = project_derivs(params, g, ms, z, cfg.with_seed(derive_seed(cfg.seed, i)), True)
        for m, est in zip(ms, ests):
            val = est.modulus().scaled(scale)
            if best is None or val.value > best[0].value:
                best = (val, z, m)
    est, z, m = best
    return NormReport(
        params,
        seminorm_opnorm(params),
        est,
        "mc_sup",
        {"grid": list(grid), "directions": directions, "argmax_z": z, "argmax_m": m},
    )


def power_derivs(N):
    """N-th order derivatives of f(z) = z_1^N: N! at (N, 0, ..., 0), else 0."""
    fact = float(math.factorial(N))

    def derivs(m, Z):
        val = fact if m[0] == N and sum(m) == N else 0.0
        return np.full(Z.shape[0], val, dtype=complex)

    return derivs


def zero_derivs(m, Z):
    return np.zeros(Z.shape[0], dtype=complex)


def besov_closed_power(params, p):
    """Besov semi-norm of z_1^N in closed form."""
    n, N = params.n, params.N
    if p * N <= n:
        raise DomainError("need p N > n")
    logv = p * log_gamma(N + 1.0) + log_gamma(n + 1.0) + log_gamma(p * N - n) - log_gamma(p * N)
    return math.exp(logv / p)


def besov_seminorm_estimate(params, f_derivs, p, cfg):
    """Monte Carlo Besov semi-norm of f from its N-th derivatives.

    ``f_derivs(m, Z)`` returns d^N f / dz^m on a ``(k, n)`` batch. The
    invariant measure is handled by sampling normalised volume and weighting
    with ``(1-|z|^2)^-(n+1)``. Returns the p-th root with a delta-method
    standard error.
    """
    n, N = params.n, params.N
    if p * N <= n:
        raise DomainError(f"need p N > n, got p = {p}")
    if p * N - n < 0.5:
        warnings.warn("p N - n < 0.5: estimator variance may diverge", RuntimeWarning)
    ms = multi_indices(n, N)
    expo = N * p - n - 1.0

    def evaluate(c, size):
        Z, gap = sample_ball_gap(n, chunk_rng(cfg.seed, c), size)
        total = np.zeros(size)
        for m in ms:
            total += np.abs(f_derivs(m, Z)) ** p
        return (total * gap**expo)[:, None]

    mean, m2, count = reduce_chunks(evaluate, cfg.samples, cfg.workers)
    s = chunk_estimates(mean, m2, count, cfg.seed, True)[0]
    if s.value <= 0.0:
        return MCEstimate(0.0, 0.0, s.samples, s.seed)
    root = s.value ** (1.0 / p)
    return MCEstimate(root, root * s.stderr / (p * s.value), s.samples, s.seed)


def bloch_sup_on_grid(params, f_derivs, radii=None, directions=8, seed=0):
    """Deterministic sup of ``(1-|z|^2)^N max_m |d^N f/dz^m|`` over a probe grid."""
    radii = np.linspace(0.0, 0.999, 400) if radii is None else radii
    best = 0.0
    ms = multi_indices(params.n, params.N)
    for r, d in _probe_points(params.n, radii, directions, seed):
        Z = (r * d)[None, :]
        val = max(abs(f_derivs(m, Z)[0]) for m in ms)
        best = max(best, (1.0 - r * r) ** params.N * val)
    return best


@dataclass
class BesovTable:
    rows: list
    target: float
    eventually_monotone: bool


def besov_limit_check(params, f_derivs, p_list, cfg, target=None):
    """Besov semi-norms for increasing p next to the Bloch semi-norm.

    ``eventually_monotone`` is True when the distance to the Bloch value never
    grows again after its largest entry.
    """
    p_list = sorted(p_list)
    for p in p_list:
        if p * params.N <= params.n:
            raise DomainError(f"p = {p} violates p N > n")
    if target is None:
        target = bloch_sup_on_grid(params, f_derivs, seed=cfg.seed)
    rows = [(p, besov_seminorm_estimate(params, f_derivs, p, cfg)) for p in p_list]
    dist = [abs(est.value - target) for _, est in rows]
    peak = int(np.argmax(dist)) if dist else 0
    tail = dist[peak:]
    mono = all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    return BesovTable(rows, target, mono)


def first_term_mc(params, cfg):
    """Monte Carlo for the sharp first term at m = (N-1, 0, ..., 0).

    Estimates ``int |w_1|^(N-1) dv_alpha`` and multiplies by the derivative
    factor of order N-1.
    """
    m = leading_index(params.n, params.N - 1)
    est = mc_integral_valpha(lambda W: abs_monomial(W, m), params, cfg)
    return est.scaled(params.deriv_factor(params.N - 1))


def extremal_sweep(params, r_list=DEFAULT_RADII, delta=None, cfg=None):
    """Scaled N-th derivative of P_alpha g at z_r = r e_1 for each r.

    ``g`` is :func:`extremal_g` at ``z_r`` (or :func:`extremal_g_delta` when
    ``delta`` is given); the target is :func:`seminorm_opnorm`. With ``delta``
    each row also carries ``|d^(N-1) P_alpha g / dz_1^(N-1) (0)|`` against the
    sharp first term.
    """
    cfg = cfg or MCConfig()
    n, N = params.n, params.N
    target = seminorm_opnorm(params)
    head_target = first_term(params)[0]
    rows = []
    for i, r in enumerate(r_list):
        if not 0.0 <= r < 1.0:
            raise DomainError("radii must lie in [0, 1)")
        row_cfg = cfg.with_seed(derive_seed(cfg.seed, i))
        z = r * ballgeom.basis(n)
        g = extremal_g(params, z) if delta is None else extremal_g_delta(params, z, delta)
        est = project_deriv(params, g, leading_index(n, N), z, row_cfg, recenter=True)
        row = SweepRow(r, est.modulus().scaled((1.0 - r * r) ** N), target)
        if delta is not None:
            head = project_deriv(params, g, leading_index(n, N - 1), np.zeros(n), row_cfg)
            row.first_term = head.modulus()
            row.first_term_target = head_target
        rows.append(row)
    return rows
