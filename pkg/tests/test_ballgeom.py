import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_bloch import ballgeom
from bergman_bloch import suites
from bergman_bloch.integrate import chunk_rng


def point(n, radius=0.95):
    coords = st.lists(
        st.floats(min_value=-1.0, max_value=1.0), min_size=2 * n, max_size=2 * n
    )

    def build(xs):
        v = ballgeom.from_real(xs)
        nv = np.linalg.norm(v)
        return v if nv < radius else v * (radius / nv)

    return coords.map(build)


pairs = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.tuples(point(n), point(n), point(n))
)


def test_real_roundtrip():
    v = np.array([1 + 2j, -0.5j])
    np.testing.assert_array_equal(ballgeom.from_real(ballgeom.to_real(v)), v)
    with pytest.raises(ValueError):
        ballgeom.from_real([1.0, 2.0, 3.0])


def test_validation():
    with pytest.raises(ValueError):
        ballgeom.ball_point([1.0, 0.0])
    with pytest.raises(ValueError):
        ballgeom.ball_point([np.nan])
    with pytest.raises(ValueError):
        ballgeom.sphere_point([0.5, 0.5])
    ballgeom.sphere_point([0.6, 0.8j])


def test_herm_inner_conjugates_second():
    assert ballgeom.herm_inner([1j], [1j]) == 1
    assert ballgeom.herm_inner([1.0], [1j]) == -1j
    with pytest.raises(ValueError):
        ballgeom.herm_inner([1, 2], [1])


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_gap_identity(ps):
    a, w, _ = ps
    pw = ballgeom.involution(a, w)
    lhs = 1 - np.vdot(pw, pw).real
    rhs = (1 - np.vdot(a, a).real) * (1 - np.vdot(w, w).real) / abs(
        1 - ballgeom.herm_inner(w, a)
    ) ** 2
    assert abs(lhs - rhs) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_inner_identity(ps):
    a, w, z = ps
    h = ballgeom.herm_inner
    lhs = 1 - h(ballgeom.involution(a, z), ballgeom.involution(a, w))
    rhs = (1 - np.vdot(a, a).real) * (1 - h(z, w)) / ((1 - h(z, a)) * (1 - h(a, w)))
    assert abs(lhs - rhs) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_involutive_and_swaps(ps):
    a, w, _ = ps
    np.testing.assert_allclose(ballgeom.involution(a, ballgeom.involution(a, w)), w, atol=1e-10)
    np.testing.assert_allclose(ballgeom.involution(a, np.zeros_like(a)), a, atol=1e-14)
    np.testing.assert_allclose(ballgeom.involution(a, a), 0, atol=1e-12)


def test_involution_batch_matches_single():
    rng = chunk_rng(3, 0)
    a = suites._random_ball(3, rng, 1)[0]
    W = suites._random_ball(3, rng, 10)
    batch = ballgeom.involution(a, W)
    for w, b in zip(W, batch):
        np.testing.assert_allclose(ballgeom.involution(a, w), b, atol=1e-15)


def test_involution_at_origin_is_minus():
    w = np.array([0.3, 0.2j])
    np.testing.assert_allclose(ballgeom.involution(np.zeros(2), w), -w)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=5).flatmap(lambda n: st.tuples(point(n), point(n))))
def test_align_unitary(ps):
    z, xi = ps
    if np.linalg.norm(z) < 1e-6:
        return
    U = ballgeom.align_unitary(z)
    n = z.size
    assert np.max(np.abs(U @ U.conj().T - np.eye(n))) <= 1e-12
    first = (U @ xi)[0]
    assert abs(first - ballgeom.herm_inner(xi, z) / np.linalg.norm(z)) <= 1e-12
    assert abs(np.linalg.norm(U @ xi) - np.linalg.norm(xi)) <= 1e-12


def test_align_unitary_zero():
    with pytest.raises(ValueError):
        ballgeom.align_unitary(np.zeros(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_jacobian_finite_difference(n):
    assert np.max(suites.jacobian_residuals(n, chunk_rng(11, n), 10)) <= 1e-6


def test_jacobian_at_origin():
    a = np.array([0.5, 0.0])
    assert ballgeom.jacobian_real(a, np.zeros(2)) == pytest.approx(0.75**3)
