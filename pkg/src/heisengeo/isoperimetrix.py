"""Planar convex geometry behind sub-Finsler structures on H^1.

The isoperimetrix of a planar norm is the boundary of its dual unit ball,
rotated counterclockwise by a quarter turn. Dilated and translated copies of it
(and arcs of those) are the shortest closed (and open) curves enclosing a given
area, which is what makes the sub-Finsler distance computable here.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .curves import HorizontalCurve, lift, signed_area
from .errors import HeisenbergError
from .planar import LpPlanar, PlanarNorm, PolygonalPlanar, cross2, lp_norm

ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _check_resolution(M):
    if int(M) != M or M < 8:
        raise HeisenbergError(f"resolution must be an integer >= 8, got {M!r}")
    return int(M)


def _exact_dual_corners(planar: PlanarNorm) -> np.ndarray | None:
    """Corners of the dual ball when it is a polygon; None for smooth duals."""
    if isinstance(planar, PolygonalPlanar):
        return planar._normals
    if isinstance(planar, LpPlanar):
        if planar.p == 1:
            return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
        if planar.p == math.inf:
            return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return None


def _lp_gradient_points(p, u):
    """Dual-sphere points whose outer normals are the directions ``u``.

    These are the gradients of ``|.|_p`` along the primal sphere. Sampling by
    normal direction keeps the polygon's turning angles uniform where the dual
    sphere is sharply curved.
    """
    z = u / lp_norm(u, p)[:, None]
    return np.sign(z) * np.abs(z) ** (p - 1.0)


def dual_sphere(planar: PlanarNorm, M: int) -> np.ndarray:
    """Counterclockwise polygon on the dual unit sphere ``{w : |w|_* = 1}``.

    Vertices are ``u(theta) / |u(theta)|_*`` on a uniform grid of ``M`` angles.
    When the dual ball is itself a polygon its corners are merged in, so the
    polygon is then exact. For other ``l_p`` norms the ``M`` points with
    uniformly spaced outer normals are merged in as well.
    """
    M = _check_resolution(M)
    theta = 2.0 * np.pi * np.arange(M) / M
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    dn = planar.dual_norm(u)
    if np.any(~np.isfinite(dn)) or np.any(dn <= 0):
        raise HeisenbergError("planar norm is degenerate: dual norm vanishes on a direction")
    w = u / dn[:, None]
    extra = _exact_dual_corners(planar)
    if extra is None and isinstance(planar, LpPlanar) and planar.p != 2:
        extra = _lp_gradient_points(planar.p, u)
    if extra is not None:
        ang = np.mod(np.arctan2(extra[:, 1], extra[:, 0]), 2 * np.pi)
        merged = np.concatenate([theta, ang])
        pts = np.concatenate([w, extra])
        order = np.argsort(merged, kind="stable")
        merged, pts = merged[order], pts[order]
        keep = np.concatenate([[True], np.diff(merged) > 1e-12])
        w = pts[keep]
    return w


@dataclass(frozen=True)
class IsoperimetrixModel:
    vertices: np.ndarray
    length: float
    area: float
    M: int
    planar: PlanarNorm

    def to_dict(self) -> dict:
        return {
            "planar": self.planar.to_dict(),
            "resolution": self.M,
            "length": self.length,
            "area": self.area,
            "vertices": self.vertices.tolist(),
        }

    def support_defect(self) -> float:
        """Max of ``| |R^{-1} v|_* - 1 |`` over the vertices."""
        back = self.vertices @ ROT90  # v -> R^T v
        return float(np.max(np.abs(self.planar.dual_norm(back) - 1.0)))


def polygon_length(vertices, planar: PlanarNorm, closed: bool = True) -> float:
    v = np.asarray(vertices, dtype=float)
    d = (np.roll(v, -1, axis=0) - v) if closed else np.diff(v, axis=0)
    return float(np.sum(planar.norm(d)))


def build_isoperimetrix(planar: PlanarNorm, M: int) -> IsoperimetrixModel:
    M = _check_resolution(M)
    return _cached_model(planar, M)


@lru_cache(maxsize=32)
def _cached_model(planar, M):
    verts = dual_sphere(planar, M) @ ROT90.T
    verts.flags.writeable = False
    model = IsoperimetrixModel(
        vertices=verts,
        length=polygon_length(verts, planar),
        area=signed_area(verts),
        M=M,
        planar=planar,
    )
    if not (model.length > 0 and model.area > 0):
        raise HeisenbergError("isoperimetrix is degenerate")
    if model.support_defect() > 1e-9:
        raise HeisenbergError("isoperimetrix vertices are off the rotated dual sphere")
    return model


def vertical_distance(planar: PlanarNorm, t: float, M: int = 4096) -> float:
    """Sub-Finsler distance from the origin to ``(0, t)`` in H^1.

    The shortest horizontal loop reaching height ``t`` projects to a dilated
    isoperimetrix enclosing area ``|t| / 4``, hence ``L_I * sqrt(|t| / (4 A_I))``.
    """
    model = build_isoperimetrix(planar, M)
    return model.length * math.sqrt(abs(float(t)) / (4.0 * model.area))


def lift_isoperimetric_path(
    planar: PlanarNorm,
    M: int,
    arc: tuple[float, float] = (0.0, 1.0),
    scale: float = 1.0,
) -> HorizontalCurve:
    """Horizontal lift of an arc of the isoperimetrix, translated to start at 0.

    ``arc`` gives start and end as fractions of the vertex cycle (``(0, 1)`` is
    the full loop). The arc is dilated by ``scale`` and parametrized by planar
    arc length.
    """
    start, end = (float(x) for x in arc)
    if not (0.0 <= start < end <= 1.0):
        raise HeisenbergError(f"arc must satisfy 0 <= start < end <= 1, got {arc!r}")
    if not scale > 0:
        raise HeisenbergError("scale must be positive")
    model = build_isoperimetrix(planar, M)
    K = len(model.vertices)
    k0 = int(round(start * K))
    k1 = int(round(end * K))
    if k1 <= k0:
        raise HeisenbergError("arc is shorter than one edge at this resolution")
    idx = np.arange(k0, k1 + 1) % K
    pts = (model.vertices[idx] - model.vertices[idx[0]]) * scale
    seg = planar.norm(np.diff(pts, axis=0))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    return lift(pts, s, 0.0)


# --- sub-Finsler distance on H^1 -------------------------------------------


def _chain_search(V, u, k0, length, sign, s, steps):
    """Largest m in [0, length] with ``<V[k0 + sign*m], u> <= s`` along a monotone chain."""
    K = len(V)
    lo = np.zeros(len(s), dtype=int)
    hi = length.copy()
    for _ in range(steps):
        mid = (lo + hi + 1) // 2
        v = V[(k0 + sign * mid) % K]
        ok = np.sum(v * u, axis=1) <= s
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid - 1)
    return lo


class _CapGeometry:
    """Caps ``{x in I : <x, u> <= s}`` of a polygonal isoperimetrix, one direction per row."""

    def __init__(self, model: IsoperimetrixModel, u: np.ndarray):
        V = np.asarray(model.vertices)
        K = len(V)
        self.V = V
        self.K = K
        self.u = u
        self.planar = model.planar
        self.kmin = self._support_vertex(-u)
        kmax = self._support_vertex(u)
        self.hmin = self._height(self.kmin)
        self.hmax = self._height(kmax)
        # the support function is unimodal along the cycle: it rises from kmin
        # to kmax in both directions
        self.up_len = (kmax - self.kmin) % K
        self.down_len = (self.kmin - kmax) % K
        self.steps = int(math.ceil(math.log2(K + 1))) + 1
        # prefix sums over a tripled vertex cycle so arcs never wrap
        E = np.roll(V, -1, axis=0) - V
        lens = np.tile(self.planar.norm(E), 3)
        crs = np.tile(cross2(V, np.roll(V, -1, axis=0)), 3)
        self.Lcum = np.concatenate([[0.0], np.cumsum(lens)])
        self.Ccum = np.concatenate([[0.0], np.cumsum(crs)])

    def _support_vertex(self, direction):
        """Vertex maximizing ``<x, direction>``, in row blocks to bound memory."""
        out = np.empty(len(direction), dtype=int)
        for lo in range(0, len(direction), 8192):
            out[lo : lo + 8192] = np.argmax(direction[lo : lo + 8192] @ self.V.T, axis=1)
        return out

    def _height(self, k):
        return np.sum(self.V[k] * self.u, axis=1)

    def up_height(self, m):
        return self._height((self.kmin + m) % self.K)

    def down_height(self, m):
        return self._height((self.kmin - m) % self.K)

    def up_index(self, s):
        return np.minimum(_chain_search(self.V, self.u, self.kmin, self.up_len, 1, s, self.steps), self.up_len - 1)

    def down_index(self, s):
        return np.minimum(_chain_search(self.V, self.u, self.kmin, self.down_len, -1, s, self.steps), self.down_len - 1)

    def evaluate(self, s, i=None, j=None):
        """Chord length, cap area and arc length (planar norm) at levels ``s``.

        ``j`` and ``i`` select the exit edge on the rising chain and the entry
        edge on the falling chain; they are searched for when omitted.
        """
        K, V = self.K, self.V
        if j is None:
            j = self.up_index(s)
        if i is None:
            i = self.down_index(s)
        # exit edge: vertices kmin+j -> kmin+j+1 ; entry edge: kmin-i-1 -> kmin-i
        qa = (self.kmin + j) % K
        qb = (self.kmin + j + 1) % K
        pa = (self.kmin - i) % K
        pb = (self.kmin - i - 1) % K
        hqa, hqb, hpa, hpb = (self._height(k) for k in (qa, qb, pa, pb))
        dq = hqb - hqa
        dp = hpb - hpa
        fq = np.where(dq > 0, (s - hqa) / np.where(dq > 0, dq, 1.0), 0.0)
        fp = np.where(dp > 0, (s - hpa) / np.where(dp > 0, dp, 1.0), 0.0)
        Q = V[qa] + fq[:, None] * (V[qb] - V[qa])
        P = V[pa] + fp[:, None] * (V[pb] - V[pa])
        a = self.kmin - i + K  # unwrapped index of vertex pa
        b = self.kmin + j + K  # unwrapped index of vertex qa
        inner_len = self.Lcum[b] - self.Lcum[a]
        inner_cr = self.Ccum[b] - self.Ccum[a]
        ell = self.planar.norm(V[pa] - P) + inner_len + self.planar.norm(Q - V[qa])
        area = 0.5 * (cross2(P, V[pa]) + inner_cr + cross2(V[qa], Q) + cross2(Q, P))
        w = np.hypot(*(Q - P).T)
        return w, area, ell

    def corner_ratio(self):
        """Limit of ``area / chord^2`` and ``arc / chord`` for caps shrinking to the lowest vertex.

        Both are constant while the cap is a triangle. A flat bottom edge gives ratio 0.
        """
        V, K = self.V, self.K
        k0 = self.kmin
        ka = (k0 + 1) % K
        kb = (k0 - 1) % K
        ha = self._height(ka) - self.hmin
        hb = self._height(kb) - self.hmin
        flat = (ha <= 0) | (hb <= 0)
        ha = np.where(flat, 1.0, ha)
        hb = np.where(flat, 1.0, hb)
        ea = (V[ka] - V[k0]) / ha[:, None]
        eb = (V[kb] - V[k0]) / hb[:, None]
        chord = np.hypot(*(ea - eb).T)
        rho = 0.5 * np.abs(cross2(ea, eb)) / chord**2
        lam = (self.planar.norm(ea) + self.planar.norm(eb)) / chord
        return np.where(flat, 0.0, rho), lam


def _quadratic_root01(a, b, c):
    """Root in [0, 1] of ``a x^2 + b x + c`` where the sign changes over [0, 1]."""
    lin = np.abs(a) <= 1e-14 * (np.abs(b) + np.abs(c))
    x_lin = -c / np.where(b != 0, b, 1.0)
    disc = np.sqrt(np.maximum(b * b - 4.0 * a * c, 0.0))
    q = -0.5 * (b + np.where(b >= 0, disc, -disc))
    r1 = q / np.where(a != 0, a, 1.0)
    r2 = c / np.where(q != 0, q, 1.0)
    inside1 = (r1 >= -1e-9) & (r1 <= 1 + 1e-9)
    x = np.where(lin, x_lin, np.where(inside1, r1, r2))
    return np.clip(np.nan_to_num(x, nan=0.0), 0.0, 1.0)


def _subfinsler_chunk(model, z, t):
    r = np.hypot(z[:, 0], z[:, 1])
    sgn = np.where(t > 0, -1.0, 1.0)
    d = sgn[:, None] * z / r[:, None]
    u = d @ ROT90.T
    geo = _CapGeometry(model, u)
    target = np.abs(t) / (4.0 * r * r)
    c0, lam0 = geo.corner_ratio()
    dnorm = model.planar.norm(d)

    def below(s, i=None, j=None):
        w, A, _ = geo.evaluate(s, i, j)
        return A <= target * w * w

    # 1. last vertex of the rising chain whose level is still below target
    lo = np.zeros(len(t), dtype=int)
    hi = geo.up_len - 1
    for _ in range(geo.steps):
        mid = (lo + hi + 1) // 2
        ok = below(geo.up_height(mid), j=mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid - 1)
    j = lo
    s_lo = geo.up_height(j)
    s_hi = np.where(j + 1 >= geo.up_len, geo.hmax, geo.up_height(j + 1))
    # 2. same on the falling chain, inside that level band
    i_lo = geo.down_index(s_lo)
    i_hi = geo.down_index(s_hi)
    lo = i_lo.copy()
    hi = i_hi.copy()
    for _ in range(geo.steps):
        mid = (lo + hi + 1) // 2
        ok = below(np.maximum(geo.down_height(mid), s_lo), i=mid, j=j) | (mid == i_lo)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid - 1)
    i = lo
    lo = np.maximum(s_lo, geo.down_height(i))
    hi = np.minimum(s_hi, np.where(i + 1 >= geo.down_len, geo.hmax, geo.down_height(i + 1)))
    # 3. both edges fixed: chord is linear and area quadratic in the level, so
    # A - target * w^2 is an exact quadratic through three samples
    def gap(s):
        w, A, _ = geo.evaluate(s, i, j)
        return A - target * w * w

    g0, gm, g1 = gap(lo), gap(0.5 * (lo + hi)), gap(hi)
    qa = 2.0 * (g1 - 2.0 * gm + g0)
    qb = g1 - g0 - qa
    x = _quadratic_root01(qa, qb, g0)
    s = lo + x * (hi - lo)
    w, A, ell = geo.evaluate(s, i, j)
    by_chord = r * ell / np.where(w > 0, w, 1.0)
    by_area = ell * np.sqrt(np.abs(t) / (4.0 * np.where(A > 0, A, 1.0)))
    out = np.where(target > 1.0, by_area, by_chord)

    corner = target <= c0
    # below the smallest triangular cap: shortest paths run along the two
    # edges at the corner; interpolate quadratically to the plane value
    frac = np.where(c0 > 0, target / np.where(c0 > 0, c0, 1.0), 0.0)
    lam_corner = dnorm + (lam0 - dnorm) * frac**2
    out = np.where(corner, r * lam_corner, out)
    # a path between two points is never shorter than its chord
    return np.maximum(out, r * dnorm)


def subfinsler_values(planar: PlanarNorm, resolution: int, z, t, chunk: int = 65536) -> np.ndarray:
    """Sub-Finsler norm ``d_SF(0, (z, t))`` on H^1, vectorized.

    For ``z != 0`` the shortest path projects to an arc of a dilated isoperimetrix
    whose chord is ``z`` and which encloses area ``|t| / 4`` with it. The arc is
    found by searching the cap level in the direction normal to ``z``: first over
    vertex levels of the polygon, then by bisection between two of them.
    Discretization error is that of the polygonal isoperimetrix at ``resolution``.
    """
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(z.shape[:-1], t.shape)
    zf = np.broadcast_to(z, shape + (2,)).reshape(-1, 2)
    tf = np.broadcast_to(t, shape).reshape(-1)
    model = build_isoperimetrix(planar, resolution)
    out = np.asarray(planar.norm(zf), dtype=float).reshape(-1).copy()
    r = np.hypot(zf[:, 0], zf[:, 1])
    vert = r == 0
    out[vert] = model.length * np.sqrt(np.abs(tf[vert]) / (4.0 * model.area))
    gen = (~vert) & (tf != 0)
    idx = np.nonzero(gen)[0]
    for k in range(0, len(idx), chunk):
        sl = idx[k : k + chunk]
        out[sl] = _subfinsler_chunk(model, zf[sl], tf[sl])
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


# --- comparisons and dumps ---------------------------------------------------


def _segment_distances(points, a, ab, denom):
    ap = points[:, None, :] - a
    f = np.clip(np.sum(ap * ab, axis=-1) / denom, 0.0, 1.0)
    proj = a + f[..., None] * ab
    return np.sqrt(np.sum((points[:, None, :] - proj) ** 2, axis=-1))


def _point_to_polyline(points, poly, k: int = 8):
    """Distance from each point to the closed polyline ``poly``.

    The closest point of a segment lies within half its length of an endpoint,
    so the segments at the ``k`` nearest vertices suffice whenever the k-th
    neighbour is farther than ``d_min + L_max / 2``; other points fall back to
    all segments.
    """
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    denom = np.sum(ab * ab, axis=1)
    denom = np.where(denom > 0, denom, 1.0)
    k = min(k, len(poly))
    dist, idx = cKDTree(poly).query(points, k=k)
    dist, idx = dist.reshape(len(points), k), idx.reshape(len(points), k)
    segs = np.concatenate([idx, (idx - 1) % len(poly)], axis=1)
    best = np.min(_segment_distances(points, a[segs], ab[segs], denom[segs]), axis=1)
    reach = dist[:, 0] + 0.5 * np.sqrt(np.max(denom))
    loose = np.nonzero(dist[:, -1] <= reach)[0] if k < len(poly) else np.array([], dtype=int)
    for lo in range(0, len(loose), 1024):
        sel = loose[lo : lo + 1024]
        best[sel] = np.min(_segment_distances(points[sel], a[None], ab[None], denom[None]), axis=1)
    return best


def hausdorff_closed(poly_a, poly_b) -> float:
    """Hausdorff distance between two closed polygons (as curves)."""
    A = np.asarray(poly_a, dtype=float)
    B = np.asarray(poly_b, dtype=float)
    return float(max(np.max(_point_to_polyline(A, B)), np.max(_point_to_polyline(B, A))))


def unit_sphere(planar: PlanarNorm, M: int) -> np.ndarray:
    """Counterclockwise polygon on ``{z : |z| = 1}`` at ``M`` uniform angles."""
    M = _check_resolution(M)
    theta = 2.0 * np.pi * np.arange(M) / M
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return u / planar.norm(u)[:, None]


def bipolar_error(planar: PlanarNorm, M: int = 2048) -> float:
    """Hausdorff distance between the unit sphere and the dual of the computed dual sphere."""
    dual_poly = PolygonalPlanar(tuple(map(tuple, dual_sphere(planar, M))))
    back = dual_sphere(dual_poly, M)
    return hausdorff_closed(back, unit_sphere(planar, 4 * M))


def random_loops_through_origin(rng: np.random.Generator, count: int, area: float, vertices=(5, 40)):
    """Random simple counterclockwise loops with one vertex at 0 and the given area."""
    loops = []
    for _ in range(count):
        k = int(rng.integers(vertices[0], vertices[1] + 1))
        ang = np.sort(rng.uniform(0, 2 * np.pi, size=k))
        rad = rng.uniform(0.3, 1.0, size=k)
        pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
        pts = pts - pts[0]
        pts *= math.sqrt(area / signed_area(pts))
        loops.append(pts)
    return loops


def optimality_defect(planar: PlanarNorm, M: int, loops) -> float:
    """Max of ``L_I - length(loop)`` over loops of the isoperimetrix's area; <= 0 when it is optimal."""
    model = build_isoperimetrix(planar, M)
    worst = -np.inf
    for loop in loops:
        scale = math.sqrt(model.area / signed_area(loop))
        worst = max(worst, model.length - polygon_length(np.asarray(loop) * scale, planar))
    return float(worst)


def model_to_csv(model: IsoperimetrixModel) -> str:
    buf = io.StringIO()
    buf.write("x,y\n")
    for x, y in model.vertices:
        buf.write(f"{format(float(x), '.17g')},{format(float(y), '.17g')}\n")
    return buf.getvalue()
