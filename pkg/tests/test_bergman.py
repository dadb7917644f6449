import numpy as np
import pytest

from bergman_bloch import ballgeom, suites
from bergman_bloch.bergman import (
    TestFunction,
    constant,
    conjugate_phase_g,
    extremal_g,
    extremal_g_delta,
    kernel,
    kernel_deriv,
    leading_index,
    monomial_function,
    multi_indices,
    multi_indices_upto,
    project,
    project_deriv,
    project_derivs,
)
from bergman_bloch.integrate import MCConfig, Params, chunk_rng
from bergman_bloch.specfun import log_gamma


def extremal_exact(n, N, alpha, r):
    """Series for |d^N P g(r e_1)| (1-r^2)^N with the extremal g at r e_1."""
    s = n + 1 + alpha + N
    ap = alpha + n - 1
    total = 0.0
    for j in range(4000):
        lg = (
            log_gamma(s / 2 + j) - log_gamma(s / 2)
            + log_gamma(s / 2 + j + N) - log_gamma(s / 2)
            - log_gamma(j + 1) - log_gamma(j + N + 1)
            + log_gamma(ap + 2) + log_gamma(j + N + 1) - log_gamma(ap + 2 + j + N)
        )
        total += np.exp(lg) * r ** (2 * j + N)
    p = Params(n, N, alpha)
    return p.deriv_factor(N) * (1 - r * r) ** N * total


def test_multi_indices():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(multi_indices(3, 4)) == 15
    assert len(multi_indices_upto(2, 2)) == 6
    assert leading_index(3, 2) == (2, 0, 0)


def test_kernel_at_origin():
    p = Params(2, 1, 0.5)
    w = np.array([0.3, 0.4j])
    assert kernel(p, np.zeros(2), w) == pytest.approx(1.0)
    assert kernel_deriv(p, (0, 0), np.array([0.1, 0.2]), w) == pytest.approx(
        kernel(p, np.array([0.1, 0.2]), w)
    )


def test_kernel_deriv_fd():
    assert np.max(suites.kernel_deriv_residuals(chunk_rng(5, 0), 20)) <= 1e-6


def test_kernel_deriv_hermitian():
    p = Params(2, 1, 1.0)
    z, w = np.array([0.2 + 0.1j, 0.3]), np.array([-0.4j, 0.5])
    assert kernel(p, z, w) == pytest.approx(np.conj(kernel(p, w, z)))


def test_kernel_deriv_mismatch():
    with pytest.raises(ValueError):
        kernel_deriv(Params(2, 1), (1,), np.zeros(2), np.zeros(2))


def test_order_above_N_rejected():
    with pytest.raises(ValueError):
        project_deriv(Params(1, 1), constant(), (2,), np.zeros(1), MCConfig(100))


def test_test_functions_bounded():
    W = suites._random_ball(2, chunk_rng(1, 0), 2000)
    z = np.array([0.9, 0.1j])
    p = Params(2, 2, 0.5)
    for g in (
        extremal_g(p, z),
        extremal_g_delta(p, z, 0.7),
        conjugate_phase_g(z, 2),
        monomial_function((1, 2)),
        monomial_function((1, 0), conjugate=True),
        constant(-1.0),
    ):
        assert g.spot_check(W)
    assert g(W[0]) == -1.0


def test_extremal_delta_regions():
    p = Params(2, 2, 0.0)
    z = np.array([0.95, 0.0])
    g = extremal_g(p, z)
    gd = extremal_g_delta(p, z, 0.8)
    outer = np.array([[0.5, 0.7j]])
    assert gd.evaluate(outer)[0] == pytest.approx(g.evaluate(outer)[0])
    inner = np.array([[0.3j, 0.1]])
    assert gd.evaluate(inner)[0] == pytest.approx(1j)
    assert gd.evaluate(np.array([[0.0, 0.1]]))[0] == 0.0
    with pytest.raises(ValueError):
        extremal_g_delta(p, z, 1.0)


@pytest.mark.parametrize("n, alpha", [(1, 0.0), (2, 1.0)])
def test_reproducing_property(n, alpha):
    # P_alpha reproduces bounded holomorphic monomials, |m| <= 3
    p = Params(n, 1, alpha)
    z = np.array([0.4] + [0.3j] * (n - 1))
    for m in multi_indices_upto(n, 3):
        est = project(p, monomial_function(m), z, MCConfig(10**6, sum(m)))
        assert est.zscore(np.prod(z ** np.array(m))) <= 4.0, m


def test_delta_difference_vanishes():
    # (1-r^2)^N |d^N P(g - g_delta)(r e_1)| -> 0 as r -> 1 at delta = 0.5
    p = Params(1, 1, 0.0)
    vals = []
    for r in (0.9, 0.95, 0.99, 0.999):
        z = np.array([r])
        g, gd = extremal_g(p, z), extremal_g_delta(p, z, 0.5)
        diff = TestFunction(lambda W: g.evaluate(W) - gd.evaluate(W), 2.0)
        est = project_deriv(p, diff, (1,), z, MCConfig(400000, 3))
        vals.append(abs(est.value) * (1 - r * r))
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.01


def test_antiholomorphic_projects_to_constant():
    p = Params(1, 1, 0.0)
    est = project(p, monomial_function((1,), conjugate=True), np.array([0.5]), MCConfig(200000, 1))
    assert abs(est.value) <= 4 * est.stderr + 1e-12


def test_project_derivs_shares_samples():
    p = Params(2, 2, 0.0)
    g = monomial_function((2, 0))
    z = np.array([0.3, 0.1])
    ests = project_derivs(p, g, [(2, 0), (1, 1)], z, MCConfig(200000, 1))
    assert ests[0].zscore(2.0) <= 4
    assert abs(ests[1].value) <= 4 * ests[1].stderr + 1e-12


@pytest.mark.parametrize("r", [0.5, 0.9])
def test_extremal_value_matches_series(r):
    p = Params(1, 1, 0.0)
    z = np.array([r])
    est = project_deriv(p, extremal_g(p, z), (1,), z, MCConfig(400000, 2), recenter=True)
    val = est.modulus().scaled(1 - r * r)
    assert val.zscore(extremal_exact(1, 1, 0.0, r)) <= 4.0


def test_extremal_series_oracle_limits():
    assert extremal_exact(1, 2, 0.0, 0.9) == pytest.approx(4.86, rel=1e-10)
    assert extremal_exact(1, 1, 0.0, 0.9) == pytest.approx(1.8433533181764679, rel=1e-10)


def test_recentring_consistency():
    # change of variables through phi_z at z = 0.7 (n, N, alpha) = (1, 1, 0)
    p = Params(1, 1, 0.0)
    z = np.array([0.7])
    g = extremal_g(p, z)
    plain = project_deriv(p, g, (1,), z, MCConfig(1000000, 5))
    moved = project_deriv(p, g, (1,), z, MCConfig(200000, 6), recenter=True)
    diff = abs(plain.value - moved.value)
    assert diff <= 4 * np.hypot(plain.stderr, moved.stderr)
    assert moved.stderr < plain.stderr


@pytest.mark.parametrize("n, N", [(1, 1), (1, 2)])
def test_conjugate_phase_reaches_lower_bound(n, N):
    # scaled N-th derivative at z0 = r e_1 tends to Gamma(N+n+alpha+1)/Gamma(n+alpha+1)
    p = Params(n, N, 0.0)
    r = 0.999
    z = r * ballgeom.basis(n)
    est = project_deriv(p, conjugate_phase_g(z, N), leading_index(n, N), z, MCConfig(400000, 1), True)
    val = est.modulus().scaled((1 - r * r) ** N)
    lower = p.deriv_factor(N)
    assert 0.95 * lower <= val.value <= lower + 4 * val.stderr
