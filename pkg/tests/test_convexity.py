import math

import pytest

from heisengeo import convexity as cv
from heisengeo.acceptance import lpa_grid
from heisengeo.group import HeisPoint
from heisengeo.norms import Koranyi, LeeNaor, Lpa, SubFinslerLift
from heisengeo.planar import LpPlanar, PolygonalPlanar


@pytest.mark.parametrize("p,expected", [(2, True), (1, False), (1.5, True), (math.inf, False), (3, True)])
def test_planar_strict_convexity(p, expected):
    assert cv.planar_strict_convexity(p) is expected
    assert cv.planar_strict_convexity(LpPlanar(p)) is expected


def test_polygons_never_strictly_convex():
    assert not cv.planar_strict_convexity(PolygonalPlanar(((1, 1), (-1, 1), (-1, -1), (1, -1))))


def test_midpoint_witness_for_n21():
    rep = cv.probe_midpoint(Lpa(2.0, 1.0), 1, samples=0)
    assert rep.verdict == cv.COUNTEREXAMPLE
    assert rep.witness["distances"] == [2.0, 1.0, 1.0]
    p1 = HeisPoint.from_dict(rep.witness["p1"])
    p2 = HeisPoint.from_dict(rep.witness["p2"])
    q = HeisPoint.from_dict(rep.witness["q"])
    # re-validates through one defect call
    again = cv.midpoint_defect(Lpa(2.0, 1.0), p1, p2, q)
    assert again["gap"] == 0.0 and again["separation"] == 1.0


@pytest.mark.parametrize("n,p,a", lpa_grid())
def test_midpoint_witness_exact_on_grid(n, p, a):
    rep = cv.probe_midpoint(Lpa(p, a), n, samples=0)
    assert rep.witness["distances"] == [2.0, 1.0, 1.0]
    assert rep.witness["separation"] > 0


@pytest.mark.parametrize("norm,n", [(Koranyi(), 1), (LeeNaor(), 1), (Koranyi(), 2)])
def test_midpoint_holds_on_samples(norm, n):
    rep = cv.probe_midpoint(norm, n, samples=400, seed=1)
    assert rep.verdict == cv.HOLDS_ON_SAMPLES and rep.samples_tested == 400


def test_midpoint_vacuous():
    rep = cv.probe_midpoint(Koranyi(), 1, samples=0)
    assert rep.verdict == cv.HOLDS_ON_SAMPLES and rep.samples_tested == 0
    assert "no samples" in rep.provenance


@pytest.mark.parametrize("norm", [Koranyi(), LeeNaor()])
def test_hsc_holds_on_samples(norm):
    rep = cv.probe_horizontal_strict_convexity(norm, 1, samples=400, seed=2)
    assert rep.verdict == cv.HOLDS_ON_SAMPLES


@pytest.mark.parametrize("p,a", [(math.inf, 0.7), (2.0, 1.0), (1.0, 0.5)])
def test_hsc_counterexample_for_lpa(p, a):
    norm = Lpa(p, a)
    rep = cv.probe_horizontal_strict_convexity(norm, 1)
    assert rep.verdict == cv.COUNTEREXAMPLE
    w = rep.witness
    again = cv.hsc_defect(norm, HeisPoint.from_dict(w["p"]), HeisPoint.from_dict(w["p_prime"]))
    assert abs(again["gap"]) <= 1e-9 and not again["horizontal_collinear"]


def test_hsc_band_must_be_positive():
    with pytest.raises(ValueError):
        cv.probe_horizontal_strict_convexity(Koranyi(), 1, band=0)


def test_horizontal_collinear_test():
    assert cv.horizontal_collinear(HeisPoint([1.0, 2.0], 0.0), HeisPoint([-2.0, -4.0], 0.0))
    assert not cv.horizontal_collinear(HeisPoint([1.0, 2.0], 0.0), HeisPoint([2.0, 1.0], 0.0))
    assert not cv.horizontal_collinear(HeisPoint([1.0, 2.0], 1e-3), HeisPoint([2.0, 4.0], 0.0))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_glp_holds_for_strictly_convex_p(p):
    rep = cv.classify_glp_lpa(p)
    assert rep.verdict == cv.THEOREM and rep.holds


@pytest.mark.parametrize("p,curve", [(1.0, "p1"), (math.inf, "pinf")])
def test_glp_witness(p, curve):
    rep = cv.classify_glp_lpa(p)
    assert rep.verdict == cv.COUNTEREXAMPLE and rep.holds is False
    assert rep.witness["curve"] == curve
    assert rep.witness["geodesic"]["is_geodesic"]
    assert rep.witness["linearity_defect"] > 0.1
    assert cv.witness_is_valid(cv.glp_witness(p, 1, rep.witness["a"]))


@pytest.mark.parametrize("n,p,a", lpa_grid())
def test_glp_views_agree(n, p, a):
    assert cv.classify_glp_lpa(p, n, a).holds == cv.glp_necessary_condition(Lpa(p, a), n).holds


def test_glp_necessary_condition_examples():
    assert cv.glp_necessary_condition(Koranyi(), 1).holds
    assert cv.glp_necessary_condition(LeeNaor(), 2).holds
    for n in (1, 2, 3):
        assert cv.glp_necessary_condition(Lpa(1.0, 0.5), n).holds is False
    assert cv.glp_necessary_condition(SubFinslerLift(LpPlanar(3.0)), 1).holds
    assert cv.glp_necessary_condition(SubFinslerLift(LpPlanar(math.inf)), 1).holds is False
    rep = cv.glp_necessary_condition(SubFinslerLift(LpPlanar(3.0)), 2)
    assert rep.verdict == cv.UNDETERMINED and rep.holds is None


@pytest.mark.parametrize("norm", [Koranyi(), LeeNaor(), Lpa(2.0, 1.0), Lpa(math.inf, 0.5)])
def test_implication_chain(norm):
    hsc = cv.probe_horizontal_strict_convexity(norm, 1, samples=100)
    mid = cv.probe_midpoint(norm, 1, samples=100)
    glp = cv.classify_glp_lpa(norm.p, 1, norm.a) if isinstance(norm, Lpa) else cv.glp_necessary_condition(norm, 1)
    assert cv.chain_consistent(hsc, mid, glp)


def test_chain_detects_inconsistency():
    held = cv.ConvexityReport(cv.HSC, cv.HOLDS_ON_SAMPLES, True, "x")
    broken = cv.ConvexityReport(cv.MIDPOINT, cv.COUNTEREXAMPLE, False, "x", {})
    glp = cv.ConvexityReport(cv.GLP, cv.THEOREM, True, "x")
    assert not cv.chain_consistent(held, broken, glp)
