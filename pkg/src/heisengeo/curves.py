"""Horizontal curves in H^n.

Curves are sampled: a strictly increasing grid ``s``, planar samples ``z`` and
heights ``t``. Lifting a planar polyline is exact, since along a straight
segment from ``z_k`` to ``z_{k+1}`` the height grows by ``2 omega(z_k, z_{k+1})``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import group
from .errors import CurveError, DimensionError, HeisenbergError
from .group import HeisPoint
from .norms import NormDescriptor, projected_norm, values


class HorizontalCurve:
    __slots__ = ("s", "z", "t")

    def __init__(self, s, z, t):
        s = np.array(s, dtype=float).reshape(-1)
        z = np.array(z, dtype=float)
        t = np.array(t, dtype=float).reshape(-1)
        if z.ndim != 2 or z.shape[1] == 0 or z.shape[1] % 2:
            raise DimensionError("planar samples must form a (K+1, 2n) array")
        if not (len(s) == len(z) == len(t)):
            raise CurveError(f"grid, planar and height samples differ in length: {len(s)}, {len(z)}, {len(t)}")
        if len(s) < 2:
            raise CurveError("a curve needs at least two samples")
        if not np.all(np.diff(s) > 0):
            raise CurveError("parameter grid must be strictly increasing")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(z)) and np.all(np.isfinite(t))):
            raise CurveError("curve samples must be finite")
        for arr in (s, z, t):
            arr.flags.writeable = False
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)

    def __setattr__(self, name, value):
        raise AttributeError("HorizontalCurve is immutable")

    @property
    def n(self) -> int:
        return self.z.shape[1] // 2

    def __len__(self):
        return len(self.s)

    def point(self, k: int) -> HeisPoint:
        return HeisPoint(self.z[k], self.t[k])

    @property
    def start(self) -> HeisPoint:
        return self.point(0)

    @property
    def end(self) -> HeisPoint:
        return self.point(-1)

    def horizontality_residual(self) -> float:
        """Max of ``|t_{k+1} - t_k - 2 omega(z_k, z_{k+1})|``; zero for exact lifts."""
        inc = np.diff(self.t) - 2.0 * group.omega(self.z[:-1], self.z[1:])
        return float(np.max(np.abs(inc)))

    def dilate(self, lam: float) -> "HorizontalCurve":
        """``s -> delta_lam(gamma(s / lam))``, sampled on the stretched grid."""
        if not lam > 0:
            raise HeisenbergError("dilation factor must be positive")
        return HorizontalCurve(lam * self.s, lam * self.z, lam * lam * self.t)

    def translate(self, g: HeisPoint) -> "HorizontalCurve":
        """Left translation ``g * gamma``."""
        if g.n != self.n:
            raise DimensionError("translation point has the wrong dimension")
        z, t = group.multiply_arrays(g.z[None], g.t, self.z, self.t)
        return HorizontalCurve(self.s, z, t)

    def to_dict(self) -> dict:
        return {"s": self.s.tolist(), "z": self.z.tolist(), "t": self.t.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "HorizontalCurve":
        for key in ("s", "z", "t"):
            if key not in data:
                raise CurveError(f"curve JSON field {key!r} is missing")
        return cls(data["s"], data["z"], data["t"])


def lift(z_samples, s_grid, t0: float = 0.0) -> HorizontalCurve:
    """Horizontal lift of the polyline through ``z_samples`` starting at height ``t0``."""
    z = np.asarray(z_samples, dtype=float)
    s = np.asarray(s_grid, dtype=float).reshape(-1)
    if z.ndim != 2:
        raise DimensionError("z_samples must be a (K+1, 2n) array")
    if len(z) != len(s):
        raise CurveError(f"{len(z)} planar samples but {len(s)} grid values")
    if len(s) < 2:
        raise CurveError("a curve needs at least two samples")
    if not np.all(np.diff(s) > 0):
        raise CurveError("parameter grid must be strictly increasing")
    inc = 2.0 * group.omega(z[:-1], z[1:])
    t = float(t0) + np.concatenate([[0.0], np.cumsum(inc)])
    return HorizontalCurve(s, z, t)


def signed_area(xy) -> float:
    """Shoelace area of a closed planar polygon, positive when counterclockwise."""
    xy = np.asarray(xy, dtype=float)
    nxt = np.roll(xy, -1, axis=0)
    return 0.5 * float(np.sum(xy[:, 0] * nxt[:, 1] - nxt[:, 0] * xy[:, 1]))


def symplectic_area(z) -> float:
    """Sum over the coordinate planes (x_i, y_i) of the signed area of a closed polyline."""
    z = np.asarray(z, dtype=float)
    n = z.shape[1] // 2
    return sum(signed_area(z[:, [i, n + i]]) for i in range(n))


def length(curve: HorizontalCurve, norm: NormDescriptor) -> float:
    """Length ``sum |z_{k+1} - z_k|`` under the projected norm; exact for polygonal lifts."""
    return float(np.sum(projected_norm(norm, np.diff(curve.z, axis=0))))


def speed(curve: HorizontalCurve, norm: NormDescriptor) -> np.ndarray:
    """Per-segment speed ``|z_{k+1} - z_k| / (s_{k+1} - s_k)``."""
    return projected_norm(norm, np.diff(curve.z, axis=0)) / np.diff(curve.s)


def arclength_reparametrize(curve: HorizontalCurve, norm: NormDescriptor, s0: float = 0.0) -> HorizontalCurve:
    seg = projected_norm(norm, np.diff(curve.z, axis=0))
    if np.any(seg <= 0):
        raise CurveError("cannot reparametrize by arc length: curve has a stationary segment")
    s = s0 + np.concatenate([[0.0], np.cumsum(seg)])
    return HorizontalCurve(s, curve.z, curve.t)


def pair_distances(norm: NormDescriptor, z1, t1, z2, t2, strict: bool = True) -> np.ndarray:
    zi, ti = group.inverse_arrays(z1, t1)
    zp, tp = group.multiply_arrays(zi, ti, z2, t2)
    return values(norm, zp, tp, strict=strict)


@dataclass
class GeodesicReport:
    pairs_tested: int
    worst_defect: float
    is_geodesic: bool
    worst_pair: tuple[float, float]
    tolerance: float

    def to_dict(self):
        return {
            "pairs_tested": self.pairs_tested,
            "worst_defect": self.worst_defect,
            "is_geodesic": self.is_geodesic,
            "worst_pair": list(self.worst_pair),
            "tolerance": self.tolerance,
        }


def verify_geodesic(
    curve: HorizontalCurve,
    norm: NormDescriptor,
    pair_budget: int = 1024,
    tol: float = 1e-9,
    strict: bool = True,
) -> GeodesicReport:
    """Check ``d(gamma(s), gamma(s')) = |s - s'|`` on sample pairs.

    All pairs of a uniform subgrid of about ``sqrt(pair_budget)`` samples are
    tested, together with consecutive pairs and each sample against both
    endpoints; then the full-resolution neighbourhoods of the 10 worst pairs.
    ``strict=False`` skips the norm validity check, for distance functions
    outside the admissible parameter range.
    """
    if pair_budget < 1:
        raise HeisenbergError("pair_budget must be at least 1")
    K = len(curve)
    if K < 2:
        raise CurveError("verify_geodesic needs at least two samples")
    k = min(K, max(2, math.isqrt(pair_budget)))
    idx = np.unique(np.round(np.linspace(0, K - 1, k)).astype(int))
    ii, jj = np.triu_indices(len(idx), 1)
    # every sample also meets its successor and both endpoints
    ks = np.arange(K)
    I = np.concatenate([idx[ii], ks[:-1], np.zeros(K - 2, dtype=int), ks[1:-1]])
    J = np.concatenate([idx[jj], ks[1:], ks[1:-1], np.full(K - 2, K - 1)])

    def defects(I, J):
        d = pair_distances(norm, curve.z[I], curve.t[I], curve.z[J], curve.t[J], strict)
        return np.abs(d - np.abs(curve.s[J] - curve.s[I]))

    dfc = defects(I, J)
    worst = np.argsort(dfc)[::-1][:10]
    spacing = max(1, (K - 1) // max(1, len(idx) - 1))
    w = min(spacing, 5)
    offs = np.arange(-w, w + 1)
    RI, RJ = [], []
    for m in worst:
        a = np.clip(I[m] + offs, 0, K - 1)
        b = np.clip(J[m] + offs, 0, K - 1)
        A, B = np.meshgrid(a, b, indexing="ij")
        RI.append(A.ravel())
        RJ.append(B.ravel())
    if RI:
        RI = np.concatenate(RI)
        RJ = np.concatenate(RJ)
        keep = RI != RJ
        I = np.concatenate([I, RI[keep]])
        J = np.concatenate([J, RJ[keep]])
        dfc = np.concatenate([dfc, defects(RI[keep], RJ[keep])])
    m = int(np.argmax(dfc))
    worst_defect = float(dfc[m])
    return GeodesicReport(
        pairs_tested=int(len(dfc)),
        worst_defect=worst_defect,
        is_geodesic=worst_defect <= tol,
        worst_pair=(float(curve.s[I[m]]), float(curve.s[J[m]])),
        tolerance=tol,
    )


def linearity_defect(curve: HorizontalCurve) -> float:
    """Distance (Euclidean, in coordinates) from the best horizontal line through the first sample.

    Zero exactly when ``gamma(s) = gamma(s_0) * ((s - s_0) z_0, 0)`` for some ``z_0``.
    """
    g0i = group.inverse_arrays(curve.z[0], curve.t[0])
    gz, gt = group.multiply_arrays(g0i[0][None], g0i[1], curve.z, curve.t)
    ds = curve.s - curve.s[0]
    z0 = ds @ gz / (ds @ ds)
    res = gz - ds[:, None] * z0[None]
    return float(np.max(np.sqrt(np.sum(res * res, axis=1) + gt * gt)))


# --- explicit curves and maps ------------------------------------------------


class CatalogCurve:
    """Closed-form horizontal curve ``R -> H^n``."""

    def __init__(self, name: str, n: int, a: float, planar, height):
        self.name = name
        self.n = n
        self.a = a
        self._planar = planar
        self._height = height

    def arrays(self, s):
        s = np.asarray(s, dtype=float)
        return self._planar(s), self._height(s)

    def __call__(self, s: float) -> HeisPoint:
        z, t = self.arrays(np.array([float(s)]))
        return HeisPoint(z[0], t[0])

    def sample(self, s_grid) -> HorizontalCurve:
        s = np.asarray(s_grid, dtype=float)
        z, t = self.arrays(s)
        return HorizontalCurve(s, z, t)

    def sample_range(self, lo: float, hi: float, samples: int = 2001) -> HorizontalCurve:
        return self.sample(np.linspace(lo, hi, samples))

    def as_map(self):
        """The curve as a map from R^1 (1-vectors) into H^n."""
        return lambda x: self(float(np.asarray(x).reshape(-1)[0]))

    def __repr__(self):
        return f"CatalogCurve({self.name!r}, n={self.n}, a={self.a})"


def catalog_p1_geodesic(n: int, a: float) -> CatalogCurve:
    """Non-linear infinite geodesic of ``(H^n, d_{N_{1,a}})``, ``0 < a <= 1``."""
    n = group.check_dim(n)
    if not 0 < a <= 1:
        raise HeisenbergError(f"the p=1 curve needs 0 < a <= 1, got {a}")

    def planar(s):
        u = a * s
        z = np.zeros(s.shape + (2 * n,))
        z[..., 0] = 0.5 * (u + np.sin(u)) / a
        z[..., n] = 0.5 * (u - np.sin(u)) / a
        return z

    def height(s):
        u = a * s
        return (2.0 * np.cos(u) + u * np.sin(u)) / a**2

    return CatalogCurve("p1", n, a, planar, height)


def catalog_pinf_geodesic(n: int, a: float) -> CatalogCurve:
    """Non-linear infinite geodesic of ``(H^n, d_{N_{inf,a}})``, ``0 < a <= n^{-1/2}``."""
    n = group.check_dim(n)
    bound = n**-0.5
    if not 0 < a <= bound:
        raise HeisenbergError(f"the p=inf curve needs 0 < a <= {bound!r}, got {a}")

    def planar(s):
        u = a * s
        z = np.zeros(s.shape + (2 * n,))
        z[..., 0] = s
        z[..., n] = 0.5 * np.sin(u) / a
        return z

    def height(s):
        u = a * s
        return (-2.0 * np.cos(u) - u * np.sin(u)) / a**2

    return CatalogCurve("pinf", n, a, planar, height)


class SineEmbedding:
    """``(x, y, t) -> (x e_1 + sin(x) e_2 + y e_{n+1}, t)`` from H^1 into H^n."""

    def __init__(self, n: int, a: float):
        n = group.check_dim(n)
        if n < 2:
            raise HeisenbergError("target must have n >= 2")
        bound = n**-0.5
        if not 0 < a <= bound:
            raise HeisenbergError(f"the sine embedding needs 0 < a <= {bound!r}, got {a}")
        self.n = n
        self.a = a

    def arrays(self, z, t):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape[:-1] + (2 * self.n,))
        out[..., 0] = z[..., 0]
        out[..., 1] = np.sin(z[..., 0])
        out[..., self.n] = z[..., 1]
        return out, np.asarray(t, dtype=float)

    def __call__(self, p: HeisPoint) -> HeisPoint:
        if p.n != 1:
            raise DimensionError("the sine embedding is defined on H^1")
        z, t = self.arrays(p.z, p.t)
        return HeisPoint(z, float(t))


def catalog_sine_embedding(n: int, a: float) -> SineEmbedding:
    return SineEmbedding(n, a)


# --- CSV ---------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_to_csv(curve: HorizontalCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s"] + [f"z_{i + 1}" for i in range(2 * curve.n)] + ["t"])
    for k in range(len(curve)):
        w.writerow([_fmt(curve.s[k])] + [_fmt(v) for v in curve.z[k]] + [_fmt(curve.t[k])])
    return buf.getvalue()


def read_curve_csv(text: str):
    """Parse curve CSV; returns ``(s, z, t)`` with ``t`` None when the column is absent."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CurveError("curve CSV is empty")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "s":
        raise CurveError("curve CSV field 's' is missing (first column)")
    zcols = [i for i, h in enumerate(header) if h.startswith("z_")]
    if not zcols or len(zcols) % 2:
        raise CurveError("curve CSV fields 'z_1..z_2n' are missing or odd in number")
    tcol = header.index("t") if "t" in header else None
    data = []
    for r, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            data.append([float(v) for v in row])
        except ValueError:
            raise CurveError(f"curve CSV line {r}: non-numeric value") from None
        if len(row) != len(header):
            raise CurveError(f"curve CSV line {r}: expected {len(header)} fields")
    arr = np.array(data, dtype=float)
    if arr.ndim != 2 or len(arr) < 2:
        raise CurveError("curve CSV needs at least two data rows")
    return arr[:, 0], arr[:, zcols], (arr[:, tcol] if tcol is not None else None)
