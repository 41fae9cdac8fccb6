"""Convexity notions for homogeneous norms on H^n and their verdicts.

Sampling can refute a property but never prove it, so every report carries one
of four verdicts: ``holds-on-samples``, ``counterexample-found``,
``classified-by-theorem`` or ``undetermined``. Counterexamples are always
re-validated through the matching defect function before they are reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import group
from .curves import catalog_p1_geodesic, catalog_pinf_geodesic, linearity_defect, verify_geodesic
from .group import HeisPoint
from .norms import Koranyi, LeeNaor, Lpa, NormDescriptor, SubFinslerLift, eval_norm, lpa_bound, values
from .planar import LpPlanar, PolygonalPlanar, format_p, parse_p

HSC = "horiz-strict-convex"
MIDPOINT = "midpoint"
GLP = "glp"
PLANAR = "planar-strict-convex"

HOLDS_ON_SAMPLES = "holds-on-samples"
COUNTEREXAMPLE = "counterexample-found"
THEOREM = "classified-by-theorem"
UNDETERMINED = "undetermined"

# a near-equality only counts as a counterexample when it sits this far
# (scale-free) from the configurations the property allows; norm gaps can
# vanish to fourth order there, so a 1e-9 gap still permits ~5e-3 deviation
SEPARATION = 0.05


@dataclass
class ConvexityReport:
    property: str
    verdict: str
    holds: bool | None
    provenance: str
    witness: dict | None = None
    samples_tested: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "property": self.property,
            "verdict": self.verdict,
            "holds": self.holds,
            "provenance": self.provenance,
            "witness": self.witness,
            "samples_tested": self.samples_tested,
            "details": self.details,
        }


# --- planar ------------------------------------------------------------------


def planar_strict_convexity(planar) -> bool:
    """Strict convexity of a planar norm; ``l_p`` is strictly convex iff ``1 < p < inf``."""
    if isinstance(planar, PolygonalPlanar):
        return False
    if isinstance(planar, LpPlanar):
        return planar.strictly_convex
    p = parse_p(planar)
    return 1 < p < math.inf


def projected_strictly_convex(norm: NormDescriptor) -> bool:
    match norm:
        case Koranyi() | LeeNaor():
            return True  # (scaled) Euclidean
        case Lpa(p=p):
            return 1 < p < math.inf
        case SubFinslerLift(planar=planar):
            return planar_strict_convexity(planar)
    raise TypeError(f"not a norm descriptor: {norm!r}")


def planar_report(planar) -> ConvexityReport:
    ok = planar_strict_convexity(planar)
    return ConvexityReport(PLANAR, THEOREM, ok, "l_p is strictly convex iff 1 < p < inf; polygonal norms never are")


# --- defect functions --------------------------------------------------------


def midpoint_defect(norm: NormDescriptor, p1: HeisPoint, p2: HeisPoint, q: HeisPoint) -> dict:
    """Distances of the triple, the equality gap and the coordinate distance of ``q`` to ``(p1 + p2) / 2``."""
    d12 = group.distance(norm, p1, p2)
    d1q = group.distance(norm, p1, q)
    d2q = group.distance(norm, p2, q)
    gap = max(abs(d12 - 2 * d1q), abs(d12 - 2 * d2q))
    mid = 0.5 * (p1.coords() + p2.coords())
    return {
        "distances": [d12, d1q, d2q],
        "gap": gap,
        "separation": float(np.linalg.norm(q.coords() - mid)),
    }


def horizontal_collinear(p: HeisPoint, q: HeisPoint, tol: float = 1e-9) -> bool:
    """Both points on one horizontal line through the origin, within ``tol``."""
    if abs(p.t) > tol or abs(q.t) > tol:
        return False
    sv = np.linalg.svd(np.vstack([p.z, q.z]), compute_uv=False)
    return bool(sv[1] <= tol * sv[0])


def collinear_deviation(norm: NormDescriptor, p: HeisPoint, q: HeisPoint) -> float:
    """Scale-free distance of ``(p, q)`` from the horizontal collinear configurations."""
    Np, Nq = eval_norm(norm, p), eval_norm(norm, q)
    sv = np.linalg.svd(np.vstack([p.z, q.z]), compute_uv=False)
    flat = sv[1] / sv[0] if sv[0] > 0 else 1.0
    return float(max(math.sqrt(abs(p.t)) / Np, math.sqrt(abs(q.t)) / Nq, flat))


def hsc_defect(norm: NormDescriptor, p: HeisPoint, q: HeisPoint) -> dict:
    """Equality gap ``N(p) + N(q) - N(p*q)`` (relative to the smaller norm) and the collinearity status."""
    Np, Nq = eval_norm(norm, p), eval_norm(norm, q)
    gap = Np + Nq - eval_norm(norm, p * q)
    return {
        "gap": gap,
        "relative_gap": gap / min(Np, Nq),
        "horizontal_collinear": horizontal_collinear(p, q),
        "deviation": collinear_deviation(norm, p, q),
    }


# --- search helpers ----------------------------------------------------------


def _pattern_search(F, X, step, iters):
    """Vectorized compass search minimizing ``F`` row by row."""
    X = X.copy()
    f = F(X)
    h = np.full(len(X), float(step)) if np.ndim(step) == 0 else np.asarray(step, dtype=float).copy()
    for _ in range(iters):
        moved = np.zeros(len(X), dtype=bool)
        for d in range(X.shape[1]):
            for sgn in (1.0, -1.0):
                Y = X.copy()
                Y[:, d] += sgn * h
                fy = F(Y)
                better = fy < f
                X[better] = Y[better]
                f[better] = fy[better]
                moved |= better
        h = np.where(moved, h, 0.5 * h)
    return X, f


def _refine(fun, x0, tol):
    res = minimize(fun, x0, method="Nelder-Mead", options={"xatol": 1e-13, "fatol": tol * 1e-3, "maxiter": 4000})
    return res.x, float(res.fun)


# --- midpoint ----------------------------------------------------------------


def lpa_midpoint_witness(n: int, a: float):
    """``(p, p^{-1}, q)`` with ``p = (e_1, 0)`` and ``q = (0, 1/a^2)``; distances (2, 1, 1)."""
    n = group.check_dim(n)
    t = 1.0 / a**2
    while a * math.sqrt(t) > 1.0:
        t = math.nextafter(t, 0.0)
    p = HeisPoint(group.unit(n, 1), 0.0)
    return p, group.inverse(p), HeisPoint(np.zeros(2 * n), t)


def probe_midpoint(
    norm: NormDescriptor,
    n: int,
    samples: int = 1000,
    seed: int = 0,
    band: float = 1e-6,
    tol: float = 1e-9,
    iters: int = 60,
    max_refine: int = 20,
) -> ConvexityReport:
    """Search for triples ``d(p, p^-1) = 2 d(p, q) = 2 d(p^-1, q)`` with ``q != e``.

    By left invariance this covers all triples. Candidates within ``band`` are
    refined to ``tol``; a refined triple counts when ``q`` stays at least
    ``SEPARATION * N(p)`` away from ``e``.
    """
    n = group.check_dim(n)
    if samples < 0:
        raise ValueError("samples must be non-negative")
    if isinstance(norm, Lpa):
        p, pinv, q = lpa_midpoint_witness(n, norm.a)
        chk = midpoint_defect(norm, p, pinv, q)
        if chk["gap"] <= tol and chk["separation"] > SEPARATION:
            return ConvexityReport(
                MIDPOINT,
                COUNTEREXAMPLE,
                False,
                "N_{p,a}: p = (e_1, 0), q = (0, 1/a^2) gives distances (2, 1, 1) with q off the affine midpoint",
                {"p1": p.to_dict(), "p2": pinv.to_dict(), "q": q.to_dict(), **chk},
                samples_tested=1,
            )
    if samples == 0:
        return ConvexityReport(MIDPOINT, HOLDS_ON_SAMPLES, True, "no samples tested", None, 0)

    rng = np.random.default_rng(seed)
    d = 2 * n + 1
    P = rng.uniform(-1, 1, size=(samples, d))
    pz, pt = P[:, :-1], P[:, -1]
    half = 0.5 * values(norm, -2 * pz, -2 * pt, strict=False)

    def F(Qc):
        qz, qt = Qc[:, :-1], Qc[:, -1]
        a = values(norm, *group.multiply_arrays(-pz, -pt, qz, qt), strict=False)
        b = values(norm, *group.multiply_arrays(pz, pt, qz, qt), strict=False)
        return np.maximum(np.abs(a - half), np.abs(b - half)) / half

    Q0 = rng.uniform(-1, 1, size=(samples, d)) * half[:, None]
    Q, f = _pattern_search(F, Q0, 0.25 * half, iters)
    sep = np.linalg.norm(Q, axis=1) / half
    cand = np.nonzero((f <= band) & (sep > SEPARATION))[0]
    cand = cand[np.argsort(-sep[cand], kind="stable")][:max_refine]
    for k in cand:
        pk = HeisPoint(pz[k], pt[k])

        def fun(x, pk=pk, h=half[k]):
            qk = HeisPoint(x[:-1], x[-1])
            return max(
                abs(group.distance(norm, pk, qk) - h),
                abs(group.distance(norm, group.inverse(pk), qk) - h),
            ) / h

        x, _ = _refine(fun, Q[k], tol)
        qk = HeisPoint(x[:-1], x[-1])
        chk = midpoint_defect(norm, pk, group.inverse(pk), qk)
        if chk["gap"] <= tol and chk["separation"] > SEPARATION * half[k]:
            return ConvexityReport(
                MIDPOINT,
                COUNTEREXAMPLE,
                False,
                "sampled search: equality triple with q off the affine midpoint",
                {"p1": pk.to_dict(), "p2": group.inverse(pk).to_dict(), "q": qk.to_dict(), **chk},
                samples_tested=samples,
            )
    return ConvexityReport(
        MIDPOINT,
        HOLDS_ON_SAMPLES,
        True,
        "sampled search found no equality triple off the affine midpoint",
        None,
        samples,
        {"band": band, "candidates_refined": int(len(cand))},
    )


# --- horizontal strict convexity ---------------------------------------------


def lpa_hsc_witness(n: int, a: float):
    """``(e_1, 1/a^2)`` and ``(e_1, -1/a^2)``: norms 1 and 1, product ``(2 e_1, 0)`` of norm 2."""
    _, _, q = lpa_midpoint_witness(n, a)
    e1 = group.unit(n, 1)
    return HeisPoint(e1, q.t), HeisPoint(e1, -q.t)


def probe_horizontal_strict_convexity(
    norm: NormDescriptor,
    n: int,
    samples: int = 1000,
    seed: int = 0,
    band: float = 1e-6,
    tol: float = 1e-9,
    iters: int = 60,
    max_refine: int = 20,
) -> ConvexityReport:
    """Search for ``p, p' != e`` with ``N(p*p') = N(p) + N(p')`` off every horizontal line through 0."""
    n = group.check_dim(n)
    if not band > 0:
        raise ValueError("band must be positive")
    if isinstance(norm, Lpa):
        p, q = lpa_hsc_witness(n, norm.a)
        chk = hsc_defect(norm, p, q)
        if abs(chk["relative_gap"]) <= tol and chk["deviation"] > SEPARATION:
            return ConvexityReport(
                HSC,
                COUNTEREXAMPLE,
                False,
                "N_{p,a}: the midpoint triple gives the equality N(p*p') = N(p) + N(p') = 2 with p, p' not horizontal",
                {"p": p.to_dict(), "p_prime": q.to_dict(), **chk},
                samples_tested=1,
            )
    if samples == 0:
        return ConvexityReport(HSC, HOLDS_ON_SAMPLES, True, "no samples tested", None, 0)

    rng = np.random.default_rng(seed)
    d = 2 * n + 1

    def F(X):
        z1, t1, z2, t2 = X[:, : d - 1], X[:, d - 1], X[:, d : 2 * d - 1], X[:, -1]
        n1 = values(norm, z1, t1, strict=False)
        n2 = values(norm, z2, t2, strict=False)
        n12 = values(norm, *group.multiply_arrays(z1, t1, z2, t2), strict=False)
        return (n1 + n2 - n12) / np.maximum(np.minimum(n1, n2), 1e-300)

    X0 = rng.uniform(-1, 1, size=(samples, 2 * d))
    X, f = _pattern_search(F, X0, 0.25, iters)
    devs = np.array([collinear_deviation(norm, HeisPoint(x[: d - 1], x[d - 1]), HeisPoint(x[d:-1], x[-1])) for x in X])
    cand = np.nonzero((f <= band) & (devs > SEPARATION))[0]
    cand = cand[np.argsort(-devs[cand], kind="stable")][:max_refine]
    for k in cand:

        def fun(x):
            return float(F(x[None])[0])

        x, _ = _refine(fun, X[k], tol)
        p, q = HeisPoint(x[: d - 1], x[d - 1]), HeisPoint(x[d:-1], x[-1])
        chk = hsc_defect(norm, p, q)
        if abs(chk["relative_gap"]) <= tol and chk["deviation"] > SEPARATION:
            return ConvexityReport(
                HSC,
                COUNTEREXAMPLE,
                False,
                "sampled search: norm equality off every horizontal line",
                {"p": p.to_dict(), "p_prime": q.to_dict(), **chk},
                samples_tested=samples,
            )
    return ConvexityReport(
        HSC,
        HOLDS_ON_SAMPLES,
        True,
        "sampled search found no norm equality off the horizontal lines",
        None,
        samples,
        {"band": band, "candidates_refined": int(len(cand))},
    )


# --- geodesic linearity ------------------------------------------------------


def glp_witness(p: float, n: int = 1, a: float | None = None, s_range=(-10.0, 10.0), samples: int = 2001, pair_budget: int = 1024):
    """Catalog curve for ``p in {1, inf}`` checked as a non-linear infinite geodesic."""
    p = parse_p(p)
    bound = lpa_bound(n, p)
    a = 0.5 * bound if a is None else float(a)
    if p == 1:
        curve = catalog_p1_geodesic(n, a)
    elif p == math.inf:
        curve = catalog_pinf_geodesic(n, a)
    else:
        raise ValueError("explicit non-linear geodesics exist only for p in {1, inf}")
    sampled = curve.sample_range(s_range[0], s_range[1], samples)
    rep = verify_geodesic(sampled, Lpa(p, a), pair_budget=pair_budget)
    lin = linearity_defect(sampled)
    return {
        "curve": curve.name,
        "n": n,
        "p": format_p(p),
        "a": a,
        "range": list(s_range),
        "samples": samples,
        "geodesic": rep.to_dict(),
        "linearity_defect": lin,
    }


def witness_is_valid(w: dict) -> bool:
    return bool(w["geodesic"]["is_geodesic"] and w["linearity_defect"] > 0.1)


def classify_glp_lpa(p: float, n: int = 1, a: float | None = None) -> ConvexityReport:
    """GLP for ``N_{p,a}``: holds exactly for ``1 < p < inf``; otherwise ship the catalog witness."""
    p = parse_p(p)
    if 1 < p < math.inf:
        return ConvexityReport(GLP, THEOREM, True, "N_{p,a} has the geodesic linearity property iff 1 < p < inf")
    w = glp_witness(p, n, a)
    if witness_is_valid(w):
        return ConvexityReport(
            GLP,
            COUNTEREXAMPLE,
            False,
            "explicit non-linear infinite geodesic of N_{p,a} for p in {1, inf}",
            w,
            samples_tested=w["geodesic"]["pairs_tested"],
        )
    return ConvexityReport(GLP, UNDETERMINED, None, "catalog witness failed re-validation", w)


def glp_necessary_condition(norm: NormDescriptor, n: int) -> ConvexityReport:
    """Verdict on GLP from the projected norm and the family-specific results."""
    n = group.check_dim(n)
    strict = projected_strictly_convex(norm)
    if n == 1:
        return ConvexityReport(
            GLP,
            THEOREM,
            strict,
            "H^1: GLP iff the projected planar norm is strictly convex",
            details={"projected_strictly_convex": strict},
        )
    if not strict:
        return ConvexityReport(
            GLP,
            THEOREM,
            False,
            "GLP requires a strictly convex projected norm",
            details={"projected_strictly_convex": False},
        )
    match norm:
        case Lpa():
            prov = "N_{p,a} with 1 < p < inf has GLP in every dimension"
        case Koranyi() | LeeNaor():
            prov = "horizontally strictly convex, hence midpoint property, hence GLP"
        case _:
            return ConvexityReport(
                GLP,
                UNDETERMINED,
                None,
                "n >= 2 outside the covered families: strict convexity of the projected norm is necessary, sufficiency is open",
                details={"projected_strictly_convex": True},
            )
    return ConvexityReport(GLP, THEOREM, True, prov, details={"projected_strictly_convex": True})


def chain_consistent(hsc: ConvexityReport, midpoint: ConvexityReport, glp: ConvexityReport) -> bool:
    """HSC => midpoint => GLP: no report may hold while the next one is refuted."""
    if hsc.holds and midpoint.verdict == COUNTEREXAMPLE:
        return False
    if midpoint.holds and glp.verdict == COUNTEREXAMPLE:
        return False
    return True
