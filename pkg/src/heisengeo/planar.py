"""Norms on the plane R^2 used to generate sub-Finsler structures on H^1."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HeisenbergError


def lp_norm(x, p: float) -> np.ndarray | float:
    """p-norm over the last axis; ``p`` may be ``math.inf``."""
    a = np.abs(np.asarray(x, dtype=float))
    if p == math.inf:
        r = np.max(a, axis=-1)
    elif p == 1:
        r = np.sum(a, axis=-1)
    elif p == 2:
        r = np.sqrt(np.sum(a * a, axis=-1))
    else:
        m = np.max(a, axis=-1)
        safe = np.where(m > 0, m, 1.0)
        r = m * np.sum((a / safe[..., None]) ** p, axis=-1) ** (1.0 / p)
    return float(r) if np.ndim(r) == 0 else r


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def parse_p(value) -> float:
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "infinity", "oo"):
            return math.inf
        value = float(v)
    p = float(value)
    if not p >= 1:
        raise HeisenbergError(f"p must lie in [1, inf], got {value!r}")
    return p


def format_p(p: float):
    return "inf" if p == math.inf else p


def cross2(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class LpPlanar:
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))

    def norm(self, z):
        return lp_norm(z, self.p)

    def dual_norm(self, w):
        return lp_norm(w, conjugate_exponent(self.p))

    @property
    def strictly_convex(self) -> bool:
        return 1 < self.p < math.inf

    def to_dict(self) -> dict:
        return {"kind": "lp", "p": format_p(self.p)}


@dataclass(frozen=True)
class PolygonalPlanar:
    """Norm whose unit sphere is a centrally symmetric convex polygon.

    ``vertices`` are listed counterclockwise. Collinear vertices are allowed.
    """

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 4:
            raise HeisenbergError("polygonal norm needs at least 4 planar vertices")
        if not np.all(np.isfinite(v)):
            raise HeisenbergError("polygon vertices must be finite")
        object.__setattr__(self, "vertices", tuple(map(tuple, v.tolist())))
        nxt = np.roll(v, -1, axis=0)
        to_origin = cross2(v, nxt)
        scale = np.max(np.abs(v)) ** 2
        if np.any(to_origin <= 1e-12 * scale):
            raise HeisenbergError("origin must lie strictly inside the polygon, vertices counterclockwise")
        turn = cross2(nxt - v, np.roll(nxt, -1, axis=0) - nxt)
        if np.any(turn < -1e-12 * scale):
            raise HeisenbergError("polygon vertices must be convex and counterclockwise")
        if np.max(np.abs(self._gauge(-v) - 1.0)) > 1e-9:
            raise HeisenbergError("polygon must be centrally symmetric to define a norm")

    @property
    def _normals(self) -> np.ndarray:
        v = np.asarray(self.vertices)
        d = np.roll(v, -1, axis=0) - v
        outward = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return outward / cross2(v, np.roll(v, -1, axis=0))[:, None]

    def _gauge(self, z):
        return np.max(np.asarray(z, dtype=float) @ self._normals.T, axis=-1)

    def norm(self, z):
        r = self._gauge(z)
        return float(r) if np.ndim(r) == 0 else r

    def dual_norm(self, w):
        r = np.max(np.asarray(w, dtype=float) @ np.asarray(self.vertices).T, axis=-1)
        return float(r) if np.ndim(r) == 0 else r

    @property
    def strictly_convex(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"kind": "polygonal", "vertices": [list(v) for v in self.vertices]}


PlanarNorm = LpPlanar | PolygonalPlanar


def planar_from_dict(data: dict) -> PlanarNorm:
    if not isinstance(data, dict) or "kind" not in data:
        raise HeisenbergError("planar norm JSON needs a 'kind' field")
    kind = data["kind"]
    if kind == "lp":
        if "p" not in data:
            raise HeisenbergError("planar norm JSON field 'p' is missing")
        return LpPlanar(parse_p(data["p"]))
    if kind == "polygonal":
        if "vertices" not in data:
            raise HeisenbergError("planar norm JSON field 'vertices' is missing")
        return PolygonalPlanar(tuple(map(tuple, data["vertices"])))
    raise HeisenbergError(f"planar norm JSON field 'kind' has unknown value {kind!r}")
