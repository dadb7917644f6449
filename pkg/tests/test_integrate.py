import math

import numpy as np
import pytest

from bergman_bloch.integrate import (
    CHUNK_SIZE,
    MCConfig,
    MCEstimate,
    NonFiniteSampleError,
    Params,
    QuadratureError,
    abs_monomial,
    adaptive_gauss_legendre,
    ball_monomial_integral,
    chunk_rng,
    derive_seed,
    mc_ball_mean,
    mc_integral_valpha,
    mc_integrals_valpha,
    mc_sphere_mean,
    polar_integral,
    sample_ball_gap,
    sphere_monomial_integral,
)
from bergman_bloch.specfun import DomainError


def test_params_validation():
    Params(1, 1, -0.5)
    for bad in [(0, 1, 0.0), (1, 0, 0.0), (1, 1, -1.0), (1.5, 1, 0.0), (1, 1, float("nan"))]:
        with pytest.raises(DomainError):
            Params(*bad)


def test_params_constants():
    p = Params(2, 1, 1.0)
    assert p.c_alpha == pytest.approx(3.0)
    assert p.deriv_factor(2) == pytest.approx(4 * 5)
    assert p.lam == pytest.approx(1.5)


def test_mcconfig_validation():
    with pytest.raises(DomainError):
        MCConfig(samples=1)
    with pytest.raises(DomainError):
        MCConfig(workers=0)
    with pytest.raises(DomainError):
        MCConfig(radial="normal")


def test_workers_env(monkeypatch):
    monkeypatch.setenv("BERGMAN_BLOCH_WORKERS", "3")
    assert MCConfig().workers == 3


def test_estimate_helpers():
    e = MCEstimate(-2.0, 0.5, 10, 0)
    assert e.modulus().value == 2.0
    assert e.scaled(-2).stderr == 1.0
    assert e.zscore(-1.0) == 2.0
    with pytest.raises(NonFiniteSampleError):
        MCEstimate(float("nan"), 0.0, 1, 0)


def test_seeds_independent():
    assert derive_seed(0, 1) != derive_seed(0, 2)
    a = chunk_rng(5, 0).random(4)
    np.testing.assert_array_equal(a, chunk_rng(5, 0).random(4))
    assert not np.array_equal(a, chunk_rng(5, 1).random(4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_volume_is_probability(n):
    est = mc_ball_mean(lambda Z, gap: np.ones(Z.shape[0]), n, MCConfig(20000))
    assert est[0].value == 1.0 and est[0].stderr == 0.0


def test_gap_is_accurate():
    Z, gap = sample_ball_gap(2, chunk_rng(0, 0), 1000)
    np.testing.assert_allclose(gap, 1 - np.sum(np.abs(Z) ** 2, axis=1), atol=1e-14)
    Z, gap = sample_ball_gap(2, chunk_rng(0, 0), 1000, "beta", 1.5)
    np.testing.assert_allclose(gap, 1 - np.sum(np.abs(Z) ** 2, axis=1), atol=1e-14)
    assert np.all(gap > 0)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5, -0.5])
@pytest.mark.parametrize("radial", ["uniform", "beta"])
def test_valpha_mass(alpha, radial):
    p = Params(2, 1, alpha)
    est = mc_integral_valpha(lambda W: np.ones(W.shape[0]), p, MCConfig(200000, 1, 1, radial))
    assert est.zscore(1.0) <= 4.0


@pytest.mark.parametrize("m", [(2, 0), (1, 1), (0, 3)])
def test_monomial_mc(m):
    p = Params(2, 1, 1.0)
    est = mc_integral_valpha(lambda W: abs_monomial(W, m), p, MCConfig(200000, 2))
    closed = ball_monomial_integral(m, p)
    assert est.zscore(closed) <= 4.0
    sph = mc_sphere_mean(lambda W: abs_monomial(W, m), 2, MCConfig(200000, 3))[0]
    assert sph.zscore(sphere_monomial_integral(m, 2)) <= 4.0


def test_recentred_is_unbiased():
    p = Params(2, 1, 1.0)
    c = np.array([0.6, 0.3j])
    f = lambda W: abs_monomial(W, (2, 1))
    est = mc_integral_valpha(f, p, MCConfig(400000, 4), center=c)
    assert est.zscore(ball_monomial_integral((2, 1), p)) <= 4.0
    beta = mc_integral_valpha(f, p, MCConfig(400000, 4, 1, "beta"), center=c)
    assert beta.zscore(ball_monomial_integral((2, 1), p)) <= 4.0


def test_mc_integrals_columns():
    p = Params(1, 1, 0.0)
    ests = mc_integrals_valpha(lambda W: np.column_stack([abs_monomial(W, (k,)) for k in range(3)]), p, MCConfig(50000))
    assert len(ests) == 3
    with pytest.raises(ValueError):
        mc_integral_valpha(lambda W: np.ones((W.shape[0], 2)), p, MCConfig(100))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_sample():
    with pytest.raises(NonFiniteSampleError):
        mc_ball_mean(lambda Z, gap: np.log(gap * 0.0), 1, MCConfig(100))


@pytest.mark.parametrize("workers", [1, 4, 16])
def test_determinism_across_workers(workers):
    p = Params(2, 1, 0.5)
    f = lambda W: np.column_stack([abs_monomial(W, (1, 1)), W[:, 0] ** 2])
    base = mc_integrals_valpha(f, p, MCConfig(5 * CHUNK_SIZE + 17, 9, 1))
    other = mc_integrals_valpha(f, p, MCConfig(5 * CHUNK_SIZE + 17, 9, workers))
    assert [e.value for e in base] == [e.value for e in other]
    assert [e.stderr for e in base] == [e.stderr for e in other]


def test_adaptive_gl():
    assert adaptive_gauss_legendre(np.exp, 0, 1) == pytest.approx(math.e - 1, rel=1e-13)
    v = adaptive_gauss_legendre(lambda x: np.sqrt(x), 0, 1, 1e-12, 1e-12)
    assert v == pytest.approx(2 / 3, rel=1e-10)
    with pytest.raises(QuadratureError):
        adaptive_gauss_legendre(lambda x: 1 / np.sqrt(np.abs(x - 0.3)), 0, 1, 1e-15, 1e-15, 500)


@pytest.mark.parametrize("alpha", [-0.7, 0.0, 1.0, 2.5])
def test_polar_mass_and_moment(alpha):
    p = Params(2, 1, alpha)
    assert polar_integral(lambda r: np.ones_like(r), p) == pytest.approx(1.0, rel=1e-9)
    # |z|^2 over the ball of C^2 is |z1|^2 + |z2|^2
    second = 2 * ball_monomial_integral((2, 0), p)
    assert polar_integral(lambda r: r * r, p) == pytest.approx(second, rel=1e-9)


def test_monomial_closed_forms():
    assert sphere_monomial_integral((0, 0), 2) == pytest.approx(1.0)
    assert sphere_monomial_integral((2,), 1) == pytest.approx(1.0)
    # int_D |z|^2 dA/pi = 1/2
    assert ball_monomial_integral((2,), Params(1, 1, 0.0)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ball_monomial_integral((1,), Params(2, 1, 0.0))


def test_change_of_variables_consistency():
    # f(w) = |1 - <z, w>|^-(n+1+alpha-N) at (n, N, alpha) = (1, 1, 0), z = 0.7
    p = Params(1, 1, 0.0)
    z = np.array([0.7])
    expo = p.n + 1 + p.alpha - p.N
    f = lambda W: np.abs(1 - W.conj() @ z) ** -expo
    direct = mc_integral_valpha(f, p, MCConfig(10**6, 1))
    moved = mc_integral_valpha(f, p, MCConfig(10**6, 2), center=z)
    assert abs(direct.value - moved.value) <= 4 * math.hypot(direct.stderr, moved.stderr)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.5])
def test_polar_matches_mc(alpha):
    p = Params(3, 1, alpha)
    profile = lambda r: np.cos(3 * r) / (1.5 - r)
    quad = polar_integral(profile, p)
    est = mc_integral_valpha(lambda W: profile(np.linalg.norm(W, axis=1)), p, MCConfig(400000, 8))
    assert est.zscore(quad) <= 4
