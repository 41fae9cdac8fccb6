import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisengeo import curves, group
from heisengeo.errors import CurveError, HeisenbergError
from heisengeo.group import HeisPoint
from heisengeo.norms import Koranyi, Lpa

loops = st.integers(3, 25).flatmap(
    lambda k: st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=k, max_size=k)
)


def test_circle_descends_by_four_pi():
    # counterclockwise unit circle: vertical gain -4 * pi
    theta = np.linspace(0, 2 * np.pi, 20001)
    c = curves.lift(np.stack([np.cos(theta), np.sin(theta)], axis=1), theta)
    assert c.t[-1] == pytest.approx(-4 * curves.signed_area(c.z[:-1]), rel=1e-12)
    assert c.t[-1] == pytest.approx(-4 * math.pi, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(loops, st.floats(-3, 3))
def test_area_law(pts, t0):
    pts = np.array(pts)
    loop = np.vstack([pts, pts[:1]])
    c = curves.lift(loop, np.arange(len(loop), dtype=float), t0)
    assert c.t[-1] - c.t[0] == pytest.approx(-4 * curves.signed_area(pts), abs=1e-11)


@settings(max_examples=50, deadline=None)
@given(loops)
def test_lift_is_horizontal_and_left_invariant(pts):
    pts = np.array(pts)
    c = curves.lift(pts, np.arange(len(pts), dtype=float))
    assert c.horizontality_residual() <= 1e-12 * (1 + np.max(np.abs(c.t)))
    g = HeisPoint([0.5, -1.5], 2.0)
    moved = c.translate(g)
    again = curves.lift(moved.z, moved.s, moved.t[0])
    assert np.allclose(again.t, moved.t, atol=1e-9)


def test_symplectic_area_n2():
    # a loop in the (x_1, y_1) plane plus a constant in (x_2, y_2) encloses the same area
    pts = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [1, 0, 1, 0], [0, 0, 1, 0]], dtype=float)
    assert curves.symplectic_area(pts) == pytest.approx(1.0)


def test_curve_validation():
    with pytest.raises(CurveError):
        curves.HorizontalCurve([0.0, 0.0], np.zeros((2, 2)), [0.0, 0.0])
    with pytest.raises(CurveError):
        curves.HorizontalCurve([0.0, 1.0], np.zeros((2, 2)), [0.0, np.nan])


def test_dilation_scales_length():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 2.0]])
    c = curves.lift(pts, np.arange(4.0))
    for norm in (Koranyi(), Lpa(1.0, 0.5)):
        assert curves.length(c.dilate(3.0), norm) == pytest.approx(3 * curves.length(c, norm))


@settings(max_examples=50, deadline=None)
@given(loops)
def test_length_bounds_endpoint_distance(pts):
    pts = np.array(pts)
    c = curves.lift(pts, np.arange(len(pts), dtype=float))
    for norm in (Koranyi(), Lpa(2.0, 1.0)):
        assert curves.length(c, norm) >= group.distance(norm, c.start, c.end) - 1e-9


def test_arclength_reparametrize():
    pts = np.array([[0, 0], [3, 4], [3, 0.0]])
    c = curves.arclength_reparametrize(curves.lift(pts, np.array([0.0, 1.0, 2.0])), Lpa(2.0, 1.0))
    assert np.allclose(c.s, [0.0, 5.0, 9.0])
    assert np.allclose(curves.speed(c, Lpa(2.0, 1.0)), 1.0)


@pytest.mark.parametrize(
    "curve,norm",
    [
        (curves.catalog_p1_geodesic(1, 0.5), Lpa(1.0, 0.5)),
        (curves.catalog_p1_geodesic(1, 1.0), Lpa(1.0, 1.0)),
        (curves.catalog_p1_geodesic(2, 0.7), Lpa(1.0, 0.7)),
        (curves.catalog_pinf_geodesic(1, 0.6), Lpa(math.inf, 0.6)),
        (curves.catalog_pinf_geodesic(2, 0.45), Lpa(math.inf, 0.45)),
    ],
)
def test_catalog_geodesics(curve, norm):
    sampled = curve.sample_range(-10, 10, 2001)
    rep = curves.verify_geodesic(sampled, norm)
    assert rep.is_geodesic and rep.pairs_tested >= 1000, rep.to_dict()
    assert curves.linearity_defect(sampled) > 0.1
    assert sampled.horizontality_residual() < 1e-3


def test_perturbed_sample_breaks_geodesic():
    sampled = curves.catalog_pinf_geodesic(1, 0.6).sample_range(-10, 10, 2001)
    z = np.array(sampled.z)
    z[1000, 0] += 0.1
    bad = curves.HorizontalCurve(sampled.s, z, sampled.t)
    assert not curves.verify_geodesic(bad, Lpa(math.inf, 0.6)).is_geodesic


def test_horizontal_line_is_linear_geodesic():
    s = np.linspace(-5, 5, 101)
    z = np.outer(s, [0.6, 0.8])
    line = curves.HorizontalCurve(s, z, np.zeros_like(s))
    assert curves.linearity_defect(line) < 1e-12
    assert curves.verify_geodesic(line, Lpa(2.0, 1.0)).is_geodesic


def test_catalog_domains():
    with pytest.raises(HeisenbergError):
        curves.catalog_p1_geodesic(1, 1.5)
    with pytest.raises(HeisenbergError):
        curves.catalog_pinf_geodesic(2, 0.8)
    with pytest.raises(HeisenbergError, match="n >= 2"):
        curves.catalog_sine_embedding(1, 0.5)


def test_csv_roundtrip():
    c = curves.catalog_p1_geodesic(2, 0.5).sample_range(-1, 1, 11)
    s, z, t = curves.read_curve_csv(curves.curve_to_csv(c))
    assert np.array_equal(s, c.s) and np.array_equal(z, c.z) and np.array_equal(t, c.t)


@pytest.mark.parametrize(
    "text,field",
    [
        ("x,z_1,z_2\n0,0,0\n1,1,1\n", "'s'"),
        ("s,z_1\n0,0\n1,1\n", "z_1"),
        ("s,z_1,z_2\n0,0,abc\n1,1,1\n", "line 2"),
        ("", "empty"),
    ],
)
def test_csv_errors_name_field(text, field):
    with pytest.raises(CurveError, match=field):
        curves.read_curve_csv(text)


def test_curve_json_roundtrip():
    c = curves.lift(np.array([[0, 0], [1, 2.0]]), np.array([0.0, 1.0]), 0.5)
    back = curves.HorizontalCurve.from_dict(c.to_dict())
    assert np.array_equal(back.t, c.t)
