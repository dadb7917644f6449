"""Verification suites shared by the CLI and the test-suite.

Each suite returns a list of plain-dict rows with a boolean ``pass`` field.
"""


import numpy as np

from . import ballgeom
from .bergman import kernel, kernel_deriv, multi_indices_upto
from .integrate import (
    Params,
    abs_monomial,
    ball_monomial_integral,
    chunk_rng,
    mc_integrals_valpha,
    mc_sphere_mean,
    sample_ball,
    sphere_monomial_integral,
)

IDENTITY_TOL = 1e-10
FD_TOL = 1e-6


def monomial_integral_rows(params, max_order, cfg, sigma=4.0, rel_tol=0.01, sphere=True):
    """Monte Carlo against the closed-form monomial integrals.

    One sample set per measure covers every multi-index with order up to
    ``max_order``.
    """
    ms = multi_indices_upto(params.n, max_order)
    rows = []

    def check(measure, m, closed, est):
        rel = abs(est.value - closed) / abs(closed)
        z = est.zscore(closed)
        rows.append(
            {
                "measure": measure,
                "m": list(m),
                "closed": closed,
                "estimate": est.value,
                "stderr": est.stderr,
                "zscore": z,
                "rel_err": rel,
                "pass": bool(z <= sigma and rel <= rel_tol),
            }
        )

    def ball_cols(W):
        return np.column_stack([abs_monomial(W, m) for m in ms])

    for m, est in zip(ms, mc_integrals_valpha(ball_cols, params, cfg)):
        check("ball", m, ball_monomial_integral(m, params), est)
    if sphere:
        for m, est in zip(ms, mc_sphere_mean(ball_cols, params.n, cfg)):
            check("sphere", m, sphere_monomial_integral(m, params.n), est)
    return rows


def _random_ball(n, rng, count, radius=1.0):
    return sample_ball(n, rng, count) * radius


def _row(name, errors, tol):
    worst = float(np.max(errors))
    return {"check": name, "max_error": worst, "tol": tol, "pass": bool(worst <= tol)}


def identity_residuals(n, rng, count):
    """Max residuals of the automorphism identities on random points."""
    A = _random_ball(n, rng, count)
    Wp = _random_ball(n, rng, count)
    Z = _random_ball(n, rng, count)
    one, two, inv = [], [], []
    for a, w, z in zip(A, Wp, Z):
        pw = ballgeom.involution(a, w)
        pz = ballgeom.involution(a, z)
        aa = np.vdot(a, a).real
        lhs1 = 1.0 - np.vdot(pw, pw).real
        rhs1 = (1.0 - aa) * (1.0 - np.vdot(w, w).real) / abs(1.0 - ballgeom.herm_inner(w, a)) ** 2
        one.append(abs(lhs1 - rhs1))
        lhs2 = 1.0 - ballgeom.herm_inner(pz, pw)
        rhs2 = (1.0 - aa) * (1.0 - ballgeom.herm_inner(z, w)) / (
            (1.0 - ballgeom.herm_inner(z, a)) * (1.0 - ballgeom.herm_inner(a, w))
        )
        two.append(abs(lhs2 - rhs2))
        inv.append(np.max(np.abs(ballgeom.involution(a, pw) - w)))
    return np.array(one), np.array(two), np.array(inv)


def unitary_residuals(n, rng, count):
    errs = []
    for z in _random_ball(n, rng, count):
        U = ballgeom.align_unitary(z)
        xi = _random_ball(n, rng, 1)[0]
        first = (U @ xi)[0] - ballgeom.herm_inner(xi, z) / np.linalg.norm(z)
        errs.append(
            max(
                np.max(np.abs(U @ U.conj().T - np.eye(n))),
                abs(first),
                abs(np.linalg.norm(U @ xi) - np.linalg.norm(xi)),
            )
        )
    return np.array(errs)


def real_jacobian_fd(a, w, h=1e-5):
    """Determinant of the real 2n x 2n Jacobian of phi_a by central differences."""
    x = ballgeom.to_real(w)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fp = ballgeom.to_real(ballgeom.involution(a, ballgeom.from_real(x + e)))
        fm = ballgeom.to_real(ballgeom.involution(a, ballgeom.from_real(x - e)))
        cols.append((fp - fm) / (2 * h))
    return float(np.linalg.det(np.column_stack(cols)))


def jacobian_residuals(n, rng, count):
    errs = []
    for _ in range(count):
        a = _random_ball(n, rng, 1, 0.8)[0]
        w = _random_ball(n, rng, 1, 0.8)[0]
        exact = ballgeom.jacobian_real(a, w)
        errs.append(abs(real_jacobian_fd(a, w) - exact) / exact)
    return np.array(errs)


def iterated_difference(f, z, m, h):
    """Mixed central difference of a holomorphic ``f`` for multi-index ``m``."""
    terms = [(1.0, np.asarray(z, dtype=complex))]
    for i, mi in enumerate(m):
        for _ in range(mi):
            step = np.zeros(len(z), dtype=complex)
            step[i] = 0.5 * h
            terms = [(c * s, p + s * step) for c, p in terms for s in (1.0, -1.0)]
    return sum(c * f(p) for c, p in terms) / h ** sum(m)


def kernel_deriv_residuals(rng, count):
    errs = []
    for _ in range(count):
        n = int(rng.integers(1, 4))
        params = Params(n, 2, float(rng.uniform(-0.5, 3.0)))
        order = int(rng.integers(1, 3))
        m = [0] * n
        for _ in range(order):
            m[int(rng.integers(0, n))] += 1
        z = _random_ball(n, rng, 1, 0.6)[0]
        w = _random_ball(n, rng, 1, 0.6)[0]
        exact = kernel_deriv(params, m, z, w)
        h = 1e-5 if order == 1 else 1e-4
        fd = iterated_difference(lambda p: kernel(params, p, w), z, m, h)
        errs.append(abs(fd - exact) / abs(exact))
    return np.array(errs)


def identity_suite(seed=0, count=1000, dims=(1, 2, 3)):
    """Identity, involution, unitary, Jacobian and kernel-derivative checks."""
    rows = []
    for n in dims:
        rng = chunk_rng(seed, 1000 + n)
        one, two, inv = identity_residuals(n, rng, count)
        rows.append(_row(f"identity_gap n={n}", one, IDENTITY_TOL))
        rows.append(_row(f"identity_inner n={n}", two, IDENTITY_TOL))
        rows.append(_row(f"involutive n={n}", inv, IDENTITY_TOL))
        rows.append(_row(f"unitary n={n}", unitary_residuals(n, rng, 100), 1e-12))
        rows.append(_row(f"jacobian_fd n={n}", jacobian_residuals(n, rng, 20), FD_TOL))
    rows.append(_row("kernel_deriv_fd", kernel_deriv_residuals(chunk_rng(seed, 2000), 20), FD_TOL))
    return rows
