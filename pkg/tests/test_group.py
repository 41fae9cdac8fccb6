import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisengeo import group
from heisengeo.errors import DimensionError
from heisengeo.group import HeisPoint

coord = st.floats(-50, 50, allow_nan=False)


def points(n):
    return st.tuples(st.lists(coord, min_size=2 * n, max_size=2 * n), coord).map(lambda zt: HeisPoint(zt[0], zt[1]))


dims = st.sampled_from([1, 2, 3])


def test_omega_sign_convention():
    for n in (1, 2, 3):
        assert group.omega(group.unit(n, 1), group.unit(n, n + 1)) == -1.0
        assert group.omega(group.unit(n, n + 1), group.unit(n, 1)) == 1.0


def test_product_by_hand():
    # (1, 0, 0) * (0, 1, 0): t = 2 omega(e_1, e_2) = -2
    p = HeisPoint([1.0, 0.0], 0.0) * HeisPoint([0.0, 1.0], 0.0)
    assert p == HeisPoint([1.0, 1.0], -2.0)
    q = HeisPoint([1.0, 2.0, 3.0, 4.0], 5.0) * HeisPoint([-1.0, 0.5, 2.0, 0.0], 1.0)
    # omega = y.x' - x.y' = (3, 4).(-1, 0.5) - (1, 2).(2, 0) = -1 - 2 = -3
    assert q == HeisPoint([0.0, 2.5, 5.0, 4.0], 6.0 - 6.0)


def test_inverse_and_identity():
    p = HeisPoint([1.0, -2.0], 3.0)
    assert group.inverse(p) == HeisPoint([-1.0, 2.0], -3.0)
    assert p * group.inverse(p) == HeisPoint.identity(1)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        HeisPoint([1.0, 0.0], 0.0) * HeisPoint([1.0, 0.0, 0.0, 0.0], 0.0)
    with pytest.raises(DimensionError):
        HeisPoint([1.0, 0.0, 0.0], 0.0)
    with pytest.raises(DimensionError):
        group.unit(2, 5)


def test_json_roundtrip():
    p = HeisPoint([0.1, 0.2, 0.3, 0.4], -7.5)
    assert HeisPoint.from_dict(p.to_dict()) == p
    assert HeisPoint.from_coords(p.coords()) == p


@settings(max_examples=200, deadline=None)
@given(dims.flatmap(lambda n: st.tuples(points(n), points(n), points(n))))
def test_associativity(triple):
    p, q, r = triple
    assert ((p * q) * r).allclose(p * (q * r), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(dims.flatmap(points))
def test_inverse_property(p):
    assert (p * group.inverse(p)).allclose(HeisPoint.identity(p.n), atol=0)
    assert (group.inverse(p) * p).allclose(HeisPoint.identity(p.n), atol=0)


@settings(max_examples=200, deadline=None)
@given(dims.flatmap(lambda n: st.tuples(points(n), points(n))), st.floats(0.01, 20))
def test_dilation_is_automorphism(pair, lam):
    p, q = pair
    lhs = group.dilate(lam, p * q)
    rhs = group.dilate(lam, p) * group.dilate(lam, q)
    assert np.allclose(lhs.coords(), rhs.coords(), rtol=1e-12, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(dims.flatmap(lambda n: st.tuples(points(n), points(n))))
def test_omega_antisymmetric(pair):
    p, q = pair
    assert group.omega(p.z, q.z) == -group.omega(q.z, p.z)
    assert group.omega(p.z, p.z) == 0.0


def test_omega_matches_j_matrix():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        z, w = rng.normal(size=(2, 2 * n))
        assert group.omega(z, w) == pytest.approx(z @ group.j_matrix(n) @ w, abs=1e-14)


def test_random_points_seeded():
    a = group.random_points(np.random.default_rng(5), 2, 10, 3.0)
    b = group.random_points(np.random.default_rng(5), 2, 10, 3.0)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.max(np.abs(a[0])) <= 3.0
