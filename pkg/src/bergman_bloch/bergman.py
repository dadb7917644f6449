"""Weighted Bergman kernel, the projection P_alpha and its derivatives.

``P_alpha g(z) = int_B K_alpha(z, w) g(w) dv_alpha(w)`` with
``K_alpha(z, w) = (1 - <z, w>)^-(n+1+alpha)``. Projections of bounded test
functions are evaluated by Monte Carlo; derivatives in ``z`` are taken under
the integral sign.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ballgeom, kernels
from .integrate import mc_integrals_valpha


def multi_indices(n, order):
    """All multi-indices of length ``n`` and order ``order``.

    Reverse-lexicographic, so ``(order, 0, ..., 0)`` comes first.
    """
    if n == 1:
        return [(order,)]
    out = []
    for first in range(order, -1, -1):
        out.extend((first,) + rest for rest in multi_indices(n - 1, order - first))
    return out


def multi_indices_upto(n, order):
    return [m for k in range(order + 1) for m in multi_indices(n, k)]


def leading_index(n, order):
    return (order,) + (0,) * (n - 1)


@dataclass(frozen=True)
class TestFunction:
    """A bounded function on the ball, evaluated on ``(k, n)`` batches."""

    __test__ = False  # not a pytest class

    evaluate: Callable[[np.ndarray], np.ndarray]
    sup_bound: float = 1.0
    name: str = ""

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if w.ndim == 1:
            return self.evaluate(w[None, :])[0]
        return self.evaluate(w)

    def spot_check(self, W):
        """True when ``|g| <= sup_bound`` (plus 1e-12) on the batch ``W``."""
        return bool(np.all(np.abs(self.evaluate(W)) <= self.sup_bound + 1e-12))


def constant(value=1.0):
    return TestFunction(
        lambda W: np.full(W.shape[0], value, dtype=complex), abs(value), f"const {value}"
    )


def monomial_function(m, conjugate=False):
    """``w^m`` (or ``conj(w)^m``) as a test function; bounded by 1 on the ball."""

    def evaluate(W):
        out = np.ones(W.shape[0], dtype=complex)
        for i, mi in enumerate(m):
            if mi:
                out = out * (W[:, i].conj() if conjugate else W[:, i]) ** mi
        return out

    return TestFunction(evaluate, 1.0, ("conj " if conjugate else "") + f"w^{tuple(m)}")


def kernel(params, z, w):
    """K_alpha(z, w) on the principal branch; ``w`` may be a batch."""
    t = 1.0 - ballgeom.herm_inner(z, w)
    return np.exp(-params.kernel_exponent * np.log(t))


def kernel_deriv(params, m, z, w):
    """d^|m| K_alpha / dz^m at (z, w); ``w`` may be a batch.

    ``Gamma(n+1+alpha+|m|)/Gamma(n+1+alpha) * conj(w)^m * (1-<z,w>)^-(n+1+alpha+|m|)``.
    """
    m = tuple(int(x) for x in m)
    z = np.ascontiguousarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if len(m) != params.n or z.shape[0] != params.n:
        raise ValueError("dimension mismatch")
    order = sum(m)
    single = w.ndim == 1
    W = np.ascontiguousarray(w[None, :] if single else w)
    vals = params.deriv_factor(order) * kernels.deriv_integrand(
        W, z, np.asarray(m), params.kernel_exponent + order
    )
    return vals[0] if single else vals


def project_derivs(params, g, ms, z, cfg, recenter=False):
    """MC estimates of d^|m| (P_alpha g) / dz^m at ``z`` for every ``m`` in ``ms``.

    All derivatives share one sample set. ``recenter=True`` samples through
    phi_z, which is what keeps estimates near the boundary usable.
    """
    z = ballgeom.ball_point(z)
    ms = [tuple(int(x) for x in m) for m in ms]
    for m in ms:
        if len(m) != params.n:
            raise ValueError(f"multi-index {m} does not match n = {params.n}")
        if sum(m) > params.N:
            raise ValueError(f"order {sum(m)} exceeds N = {params.N}")

    def integrand(W):
        W = np.ascontiguousarray(W)
        gw = g.evaluate(W)
        cols = [
            params.deriv_factor(sum(m))
            * kernels.deriv_integrand(W, z, np.asarray(m), params.kernel_exponent + sum(m))
            * gw
            for m in ms
        ]
        return np.column_stack(cols)

    return mc_integrals_valpha(integrand, params, cfg, center=z if recenter else None)


def project_deriv(params, g, m, z, cfg, recenter=False):
    return project_derivs(params, g, [m], z, cfg, recenter)[0]


def project(params, g, z, cfg, recenter=False):
    """MC estimate of P_alpha g (z)."""
    return project_deriv(params, g, (0,) * params.n, z, cfg, recenter)


def _phase(t, power):
    # (t / |t|)^power on the principal branch
    return np.exp(1j * power * np.angle(t))


def extremal_g(params, z_r):
    """Unimodular function aligning the kernel phase at ``z_r``.

    ``(1 - <z_r, w>)^s / |1 - <z_r, w>|^s`` with ``s = n + N + alpha + 1``.
    """
    z_r = np.ascontiguousarray(ballgeom.ball_point(z_r))
    s = params.kernel_exponent + params.N

    def evaluate(W):
        return _phase(1.0 - W.conj() @ z_r, s)

    return TestFunction(evaluate, 1.0, "extremal")


def extremal_g_delta(params, z_r, delta):
    """Extremal function with the ball of radius delta^2 replaced.

    Equals :func:`extremal_g` for ``|w| >= delta`` and ``(w_1/|w_1|)^(N-1)``
    for ``|w| <= delta^2`` (0 where ``w_1 = 0``); in between the two are
    blended linearly in ``|w|``, so the modulus never exceeds 1.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    outer = extremal_g(params, z_r)
    N = params.N
    lo, hi = delta * delta, delta

    def inner(W):
        w1 = W[:, 0]
        mod = np.abs(w1)
        out = np.zeros(W.shape[0], dtype=complex)
        nz = mod > 0
        out[nz] = (w1[nz] / mod[nz]) ** (N - 1)
        if N == 1:
            out[:] = 1.0
        return out

    def evaluate(W):
        rad = np.linalg.norm(W, axis=1)
        t = np.clip((rad - lo) / (hi - lo), 0.0, 1.0)
        out = np.empty(W.shape[0], dtype=complex)
        full = t >= 1.0
        out[full] = outer.evaluate(W[full])
        rest = ~full
        if np.any(rest):
            tr = t[rest]
            val = (1.0 - tr) * inner(W[rest])
            blend = tr > 0.0
            if np.any(blend):
                val[blend] += tr[blend] * outer.evaluate(W[rest][blend])
            out[rest] = val
        return out

    return TestFunction(evaluate, 1.0, f"extremal delta={delta}")


def conjugate_phase_g(z0, N):
    """``(1 - <z0, w>)^N / (1 - <w, z0>)^N``, unimodular."""
    z0 = np.ascontiguousarray(ballgeom.ball_point(z0))

    def evaluate(W):
        return _phase(1.0 - W.conj() @ z0, 2 * N)

    return TestFunction(evaluate, 1.0, "conjugate phase")
