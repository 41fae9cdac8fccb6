import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisengeo.errors import HeisenbergError
from heisengeo.planar import LpPlanar, PolygonalPlanar, conjugate_exponent, lp_norm, parse_p, planar_from_dict

ps = st.sampled_from([1.0, 1.5, 2.0, 3.0, 6.0, math.inf])
vec = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=2).map(np.array)


def test_lp_values():
    assert lp_norm(np.array([3.0, -4.0]), 2) == 5.0
    assert lp_norm(np.array([3.0, -4.0]), 1) == 7.0
    assert lp_norm(np.array([3.0, -4.0]), math.inf) == 4.0


def test_conjugates():
    assert conjugate_exponent(1) == math.inf
    assert conjugate_exponent(math.inf) == 1
    assert conjugate_exponent(3) == pytest.approx(1.5)


def test_parse_p():
    assert parse_p("inf") == math.inf
    assert parse_p("1.5") == 1.5
    with pytest.raises(HeisenbergError):
        parse_p("0.5")


@settings(max_examples=100, deadline=None)
@given(ps, vec, vec)
def test_holder(p, z, w):
    # |<z, w>| <= |z|_p |w|_q with q the conjugate exponent
    pl = LpPlanar(p)
    assert abs(z @ w) <= pl.norm(z) * pl.dual_norm(w) * (1 + 1e-12) + 1e-12


def test_dual_norm_is_attained():
    pl = LpPlanar(3.0)
    w = np.array([0.3, -0.8])
    theta = np.linspace(0, 2 * np.pi, 200001)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    best = np.max(u @ w / pl.norm(u))
    assert pl.dual_norm(w) == pytest.approx(best, rel=1e-9)


def test_polygon_square_is_linf():
    sq = PolygonalPlanar(((1, 1), (-1, 1), (-1, -1), (1, -1)))
    z = np.random.default_rng(0).normal(size=(100, 2))
    assert np.allclose(sq.norm(z), lp_norm(z, math.inf))
    assert np.allclose(sq.dual_norm(z), lp_norm(z, 1))
    assert not sq.strictly_convex


def test_polygon_must_be_symmetric_convex():
    with pytest.raises(HeisenbergError):
        PolygonalPlanar(((1, 0), (0, 1), (-2, 0), (0, -1)))


def test_planar_dict_roundtrip():
    for pl in (LpPlanar(3.0), LpPlanar(math.inf), PolygonalPlanar(((1, 1), (-1, 1), (-1, -1), (1, -1)))):
        assert planar_from_dict(pl.to_dict()) == pl
