"""Homogeneous homomorphisms into H^n, isometry probes and the affine-fit test.

A homogeneous homomorphism H^m -> H^n is ``(z, t) -> (T z, a t)`` with
``a J_m = T^t J_n T``; from R^m it is ``z -> (T z, 0)`` with ``T^t J_n T = 0``.
Isometric embeddings into a target with the geodesic linearity property are
left translations of such maps, so :func:`fit_affine` fits ``L_{f(0)} o A`` to a
map and measures how far it is from that form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import group
from .curves import SineEmbedding, catalog_p1_geodesic, catalog_pinf_geodesic
from .errors import DimensionError, HeisenbergError
from .group import HeisPoint
from .norms import Lpa, NormDescriptor, values
from .planar import lp_norm

HEISENBERG = "heisenberg"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class Space:
    """A source or target space: ``(H^dim, d_norm)`` or ``(R^dim, |.|_p)``."""

    kind: str
    dim: int
    norm: NormDescriptor | None = None
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in (HEISENBERG, EUCLIDEAN):
            raise HeisenbergError(f"unknown space kind {self.kind!r}")
        group.check_dim(self.dim)
        if self.kind == HEISENBERG and self.norm is None:
            raise HeisenbergError("a Heisenberg space needs a norm")

    def random(self, rng, size, radius):
        if self.kind == HEISENBERG:
            return group.random_points(rng, self.dim, size, radius)
        return (rng.uniform(-radius, radius, size=(size, self.dim)),)

    def distances(self, P, Q) -> np.ndarray:
        if self.kind == EUCLIDEAN:
            return lp_norm(Q[0] - P[0], self.p)
        zi, ti = group.inverse_arrays(*P)
        z, t = group.multiply_arrays(zi, ti, *Q)
        return values(self.norm, z, t)


def heisenberg(norm: NormDescriptor, n: int) -> Space:
    return Space(HEISENBERG, n, norm)


def euclidean(m: int, p: float = 2.0) -> Space:
    return Space(EUCLIDEAN, m, None, p)


class VectorMap:
    """A map into H^n with an optional vectorized form.

    ``point_fn`` takes a :class:`HeisPoint` (Heisenberg source) or a 1-D array
    (Euclidean source) and returns a HeisPoint. ``array_fn`` takes the source
    arrays and returns ``(z, t)``.
    """

    def __init__(self, point_fn: Callable, array_fn: Callable | None = None, name: str = "map"):
        self.point_fn = point_fn
        self.array_fn = array_fn
        self.name = name

    def __call__(self, p):
        return self.point_fn(p)

    def __repr__(self):
        return f"VectorMap({self.name!r})"


def map_arrays(f, source: Space, P):
    """Apply ``f`` to a batch of source points, vectorized when possible."""
    if isinstance(f, VectorMap) and f.array_fn is not None:
        z, t = f.array_fn(*P)
        return np.asarray(z, dtype=float), np.asarray(t, dtype=float)
    if source.kind == HEISENBERG:
        imgs = [f(HeisPoint(z, t)) for z, t in zip(*P)]
    else:
        imgs = [f(x) for x in P[0]]
    return np.array([g.z for g in imgs]), np.array([g.t for g in imgs])


# --- specs -------------------------------------------------------------------


@dataclass(frozen=True)
class HomSpec:
    """``A(z, t) = (T z, a t)`` (Heisenberg source) or ``A(z) = (T z, 0)`` (Euclidean source)."""

    T: np.ndarray
    a: float | None
    source: str
    m: int
    n: int

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        if self.source not in (HEISENBERG, EUCLIDEAN):
            raise HeisenbergError(f"HomSpec source must be 'heisenberg' or 'euclidean', got {self.source!r}")
        m, n = group.check_dim(self.m), group.check_dim(self.n)
        cols = 2 * m if self.source == HEISENBERG else m
        if T.shape != (2 * n, cols):
            raise DimensionError(f"T must have shape {(2 * n, cols)}, got {T.shape}")
        if self.source == HEISENBERG:
            if self.a is None or not math.isfinite(float(self.a)):
                raise HeisenbergError("a Heisenberg-source HomSpec needs a finite a")
            object.__setattr__(self, "a", float(self.a))
        else:
            object.__setattr__(self, "a", None)
        T.flags.writeable = False
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    def to_dict(self) -> dict:
        out = {"T": self.T.tolist(), "source": self.source, "m": self.m, "n": self.n}
        if self.a is not None:
            out["a"] = self.a
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HomSpec":
        for key in ("T", "source", "m", "n"):
            if key not in data:
                raise HeisenbergError(f"HomSpec JSON field {key!r} is missing")
        if data["source"] == HEISENBERG and "a" not in data:
            raise HeisenbergError("HomSpec JSON field 'a' is missing")
        return cls(np.array(data["T"], dtype=float), data.get("a"), data["source"], int(data["m"]), int(data["n"]))

    @classmethod
    def identity(cls, n: int) -> "HomSpec":
        return cls(np.eye(2 * n), 1.0, HEISENBERG, n, n)


@dataclass(frozen=True)
class HomCheck:
    residual: float
    tolerance: float = 1e-10

    @property
    def holds(self) -> bool:
        return self.residual <= self.tolerance


def check_hom(spec: HomSpec, tol: float = 1e-10) -> HomCheck:
    """Max-norm of ``a J_m - T^t J_n T`` (or of ``T^t J_n T`` for a Euclidean source)."""
    G = spec.T.T @ group.j_matrix(spec.n) @ spec.T
    if spec.source == HEISENBERG:
        G = spec.a * group.j_matrix(spec.m) - G
    return HomCheck(float(np.max(np.abs(G))), tol)


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    rank: int
    root: float | None
    a: float | None
    reason: str


def numerical_rank(T) -> int:
    sv = np.linalg.svd(np.asarray(T, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > 1e-8 * sv[0]))


def is_injective_hom(spec: HomSpec, rtol: float = 1e-9) -> InjectivityReport:
    """Injectivity test; for a Heisenberg source also compares |a| with ``det(T^t J T)^{1/(2m)}``."""
    rank = numerical_rank(spec.T)
    if spec.source == EUCLIDEAN:
        ok = rank == spec.m
        return InjectivityReport(ok, rank, None, None, "rank T = m" if ok else f"rank T = {rank} < m")
    a = spec.a
    G = spec.T.T @ group.j_matrix(spec.n) @ spec.T
    det = float(np.linalg.det(G))
    root = abs(det) ** (1.0 / (2 * spec.m))
    if a == 0:
        return InjectivityReport(False, rank, root, a, "a = 0")
    if spec.m > spec.n:
        return InjectivityReport(False, rank, root, a, "m > n")
    if rank != 2 * spec.m:
        return InjectivityReport(False, rank, root, a, f"rank T = {rank} < 2m")
    if abs(abs(a) - root) > rtol * max(1.0, root):
        return InjectivityReport(False, rank, root, a, "|a| differs from det(T^t J T)^(1/2m)")
    return InjectivityReport(True, rank, root, a, "a != 0, rank T = 2m, |a| matches the determinant root")


def apply_hom_arrays(spec: HomSpec, z, t=None):
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != spec.T.shape[1]:
        raise DimensionError(f"source points have dimension {z.shape[-1]}, T expects {spec.T.shape[1]}")
    out = z @ spec.T.T
    if spec.source == EUCLIDEAN:
        return out, np.zeros(z.shape[:-1])
    return out, spec.a * np.asarray(t, dtype=float)


def apply_hom(spec: HomSpec, p) -> HeisPoint:
    if spec.source == HEISENBERG:
        if not isinstance(p, HeisPoint):
            raise HeisenbergError("a Heisenberg-source homomorphism acts on HeisPoint values")
        if p.n != spec.m:
            raise DimensionError(f"point of H^{p.n} given to a map from H^{spec.m}")
        z, t = apply_hom_arrays(spec, p.z, p.t)
        return HeisPoint(z, float(t))
    x = np.asarray(p, dtype=float).reshape(-1)
    z, _ = apply_hom_arrays(spec, x)
    return HeisPoint(z, 0.0)


def affine_map(spec: HomSpec, translation: HeisPoint | None = None) -> VectorMap:
    """``L_g o A`` as a vectorized map."""
    g = translation if translation is not None else HeisPoint.identity(spec.n)
    if g.n != spec.n:
        raise DimensionError("translation lives in the wrong group")

    def arrays(*P):
        z, t = apply_hom_arrays(spec, *P)
        return group.multiply_arrays(g.z, g.t, z, t)

    def point(p):
        P = (p.z, p.t) if isinstance(p, HeisPoint) else (np.asarray(p, dtype=float),)
        z, t = arrays(*P)
        return HeisPoint(z, float(t))

    return VectorMap(point, arrays, "affine")


# --- random valid specs ------------------------------------------------------


def random_symplectic(rng: np.random.Generator, n: int, factors: int = 6) -> np.ndarray:
    """Random element of Sp(2n) as a product of elementary symplectic matrices.

    Factors are rotations of a coordinate plane (x_i, y_i), simultaneous
    rotations of (x_i, x_j) and (y_i, y_j), and scalings ``x_i -> d x_i``,
    ``y_i -> y_i / d``.
    """
    S = np.eye(2 * n)
    for _ in range(factors):
        E = np.eye(2 * n)
        kind = rng.integers(3) if n > 1 else rng.choice([0, 2])
        i = int(rng.integers(n))
        if kind == 0:
            th = rng.uniform(0, 2 * np.pi)
            c, s = math.cos(th), math.sin(th)
            E[i, i], E[i, n + i], E[n + i, i], E[n + i, n + i] = c, -s, s, c
        elif kind == 1:
            j = int(rng.integers(n - 1))
            j = j + 1 if j >= i else j
            th = rng.uniform(0, 2 * np.pi)
            c, s = math.cos(th), math.sin(th)
            for off in (0, n):
                E[off + i, off + i], E[off + i, off + j] = c, -s
                E[off + j, off + i], E[off + j, off + j] = s, c
        else:
            d = math.exp(rng.uniform(-0.5, 0.5))
            E[i, i], E[n + i, n + i] = d, 1.0 / d
        S = E @ S
    return S


def tau(m: int) -> np.ndarray:
    """The swap ``(x, y) -> (y, x)`` on R^{2m}; it reverses the sign of omega."""
    e = np.eye(m)
    z = np.zeros((m, m))
    return np.block([[z, e], [e, z]])


def random_hom_spec(rng: np.random.Generator, m: int, n: int, negative: bool | None = None) -> HomSpec:
    """Random injective homogeneous homomorphism H^m -> H^n (``m <= n``)."""
    if m > n:
        raise DimensionError("an injective homomorphism H^m -> H^n needs m <= n")
    S = random_symplectic(rng, n)
    cols = list(range(m)) + list(range(n, n + m))
    B = S[:, cols]
    if negative is None:
        negative = bool(rng.integers(2))
    mag = float(rng.uniform(0.5, 2.0))
    if negative:
        return HomSpec(math.sqrt(mag) * B @ tau(m), -mag, HEISENBERG, m, n)
    return HomSpec(math.sqrt(mag) * B, mag, HEISENBERG, m, n)


# --- probes ------------------------------------------------------------------


@dataclass
class IsometryReport:
    samples_tested: int
    worst_defect: float
    witness: tuple | None

    def to_dict(self):
        return {
            "samples_tested": self.samples_tested,
            "worst_defect": self.worst_defect,
            "witness": None if self.witness is None else [_point_json(p) for p in self.witness],
        }


def _point_json(p):
    return p.to_dict() if isinstance(p, HeisPoint) else [float(v) for v in np.asarray(p).reshape(-1)]


def _source_point(source: Space, P, k):
    if source.kind == HEISENBERG:
        return HeisPoint(P[0][k], P[1][k])
    return np.array(P[0][k])


def isometry_probe(f, source: Space, target: Space, samples: int = 10_000, seed: int = 0, radius: float = 10.0) -> IsometryReport:
    """Worst ``|d_2(f(p), f(q)) - d_1(p, q)|`` over seeded pairs in the box of half-width ``radius``."""
    if target.kind != HEISENBERG:
        raise HeisenbergError("targets are Heisenberg spaces")
    rng = np.random.default_rng(seed)
    P = source.random(rng, samples, radius)
    Q = source.random(rng, samples, radius)
    d1 = source.distances(P, Q)
    d2 = target.distances(map_arrays(f, source, P), map_arrays(f, source, Q))
    dfc = np.abs(d2 - d1)
    k = int(np.argmax(dfc))
    return IsometryReport(samples, float(dfc[k]), (_source_point(source, P, k), _source_point(source, Q, k)))


@dataclass
class AffineFitReport:
    translation: HeisPoint
    fitted: HomSpec
    residual: float
    is_affine: bool
    tolerance: float
    samples_tested: int

    def to_dict(self):
        return {
            "translation": self.translation.to_dict(),
            "fitted": self.fitted.to_dict(),
            "residual": self.residual,
            "is_affine": self.is_affine,
            "tolerance": self.tolerance,
            "samples_tested": self.samples_tested,
        }


def fit_affine(
    f,
    source: Space,
    target: Space,
    samples: int = 256,
    seed: int = 0,
    radius: float = 10.0,
    tol: float = 1e-9,
) -> AffineFitReport:
    """Fit ``L_{f(0)} o A`` to ``f`` from unit probes and measure the residual.

    With ``g(p) = f(0)^{-1} * f(p)``, column j of T is the planar part of
    ``g(e_j)`` and ``a`` is the height of ``g((0, 1))``. The residual is the
    largest target distance between ``f`` and the fitted map on independent
    seeded points.
    """
    m, n = source.dim, target.dim
    if source.kind == HEISENBERG:
        zero = (np.zeros((1, 2 * m)), np.zeros(1))
        probes = (np.vstack([np.eye(2 * m), np.zeros((1, 2 * m))]), np.concatenate([np.zeros(2 * m), [1.0]]))
    else:
        zero = (np.zeros((1, m)),)
        probes = (np.eye(m),)
    z0, t0 = map_arrays(f, source, zero)
    g0 = HeisPoint(z0[0], t0[0])
    if g0.n != n:
        raise DimensionError(f"map lands in H^{g0.n}, target is H^{n}")
    gz, gt = map_arrays(f, source, probes)
    iz, it = group.inverse_arrays(g0.z, g0.t)
    hz, ht = group.multiply_arrays(iz, it, gz, gt)
    if source.kind == HEISENBERG:
        spec = HomSpec(hz[: 2 * m].T, float(ht[2 * m]), HEISENBERG, m, n)
    else:
        spec = HomSpec(hz.T, None, EUCLIDEAN, m, n)

    rng = np.random.default_rng(seed)
    P = source.random(rng, samples, radius)
    fz, ft = map_arrays(f, source, P)
    model = affine_map(spec, g0)
    mz, mt = model.array_fn(*P)
    res = target.distances((fz, ft), (mz, mt))
    residual = float(np.max(res))
    return AffineFitReport(g0, spec, residual, residual <= tol, tol, samples)


# --- built-in maps -----------------------------------------------------------


def sine_map(n: int, a: float):
    emb = SineEmbedding(n, a)
    return VectorMap(emb, emb.arrays, "sine"), heisenberg(Lpa(math.inf, a), 1), heisenberg(Lpa(math.inf, a), n)


def curve_map(curve, norm: NormDescriptor):
    def arrays(x):
        return curve.arrays(np.asarray(x, dtype=float)[..., 0])

    def point(x):
        return curve(float(np.asarray(x).reshape(-1)[0]))

    return VectorMap(point, arrays, curve.name), euclidean(1), heisenberg(norm, curve.n)


def swap_map(b: float):
    """``((x, y), t) -> ((x - y, x + y), 2t)`` from (H^1, N_{1, sqrt2 b}) to (H^1, N_{inf, b})."""
    spec = HomSpec(np.array([[1.0, -1.0], [1.0, 1.0]]), 2.0, HEISENBERG, 1, 1)
    return affine_map(spec), heisenberg(Lpa(1.0, math.sqrt(2.0) * b), 1), heisenberg(Lpa(math.inf, b), 1), spec


BUILTIN_MAPS = ("sine", "pinf", "p1", "swap")


def builtin_map(name: str, n: int, a: float):
    """``(map, source, target)`` for one of :data:`BUILTIN_MAPS`."""
    if name == "sine":
        return sine_map(n, a)
    if name == "pinf":
        return curve_map(catalog_pinf_geodesic(n, a), Lpa(math.inf, a))
    if name == "p1":
        return curve_map(catalog_p1_geodesic(n, a), Lpa(1.0, a))
    if name == "swap":
        if n != 1:
            raise DimensionError("the swap map acts on H^1")
        return swap_map(a)[:3]
    raise HeisenbergError(f"unknown builtin map {name!r}; choose from {', '.join(BUILTIN_MAPS)}")
