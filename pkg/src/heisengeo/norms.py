"""Homogeneous norms on H^n and randomized checks of the norm axioms.

The descriptor set is closed: Koranyi, Lee-Naor, the ``N_{p,a}`` family and the
sub-Finsler norm generated by a planar norm (H^1 only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import group
from .errors import DimensionError, HeisenbergError, InvalidNormError
from .group import HeisPoint
from .planar import LpPlanar, PlanarNorm, format_p, lp_norm, parse_p, planar_from_dict


@dataclass(frozen=True)
class Koranyi:
    """``(|z|_2^4 + t^2)^(1/4)``."""

    kind = "koranyi"

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class LeeNaor:
    """``sqrt(N_K(z, t)^2 + |z|_2^2)``."""

    kind = "leenaor"

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Lpa:
    """``max(|z|_p, a sqrt|t|)``; a norm only below the threshold of :func:`is_valid_lpa`."""

    p: float
    a: float
    kind = "lpa"

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))
        a = float(self.a)
        if not (a > 0 and math.isfinite(a)):
            raise HeisenbergError(f"a must be a positive real, got {self.a!r}")
        object.__setattr__(self, "a", a)

    def to_dict(self):
        return {"kind": self.kind, "p": format_p(self.p), "a": self.a}


@dataclass(frozen=True)
class SubFinslerLift:
    """Sub-Finsler norm ``d_SF((z, t), 0)`` on H^1 generated by a planar norm.

    Evaluated through the polygonal isoperimetrix at ``resolution`` vertices, so
    values away from the horizontal plane carry a discretization error.
    """

    planar: PlanarNorm = field(default_factory=LpPlanar)
    resolution: int = 1024
    kind = "subfinsler"

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 8 or self.resolution % 2:
            raise HeisenbergError("resolution must be an even integer >= 8")
        object.__setattr__(self, "resolution", int(self.resolution))

    def to_dict(self):
        return {"kind": self.kind, "planar": self.planar.to_dict(), "resolution": self.resolution}


NormDescriptor = Koranyi | LeeNaor | Lpa | SubFinslerLift


@dataclass(frozen=True)
class LpaValidity:
    valid: bool
    bound: float
    regime: str

    def __bool__(self):
        return self.valid


def lpa_bound(n: int, p: float) -> float:
    """Largest admissible ``a`` for ``N_{p,a}`` on H^n.

    The triangle inequality reduces to ``a^2 |omega(z, z')| <= |z|_p |z'|_p``.
    For ``p > 2`` the supremum of the ratio on R^{2n} is ``(2n)^{1 - 2/p}``
    (Cauchy-Schwarz, attained by :func:`lpa_witness_pair`), so the bound is
    ``(2n)^{1/p - 1/2}``.
    """
    n = group.check_dim(n)
    p = parse_p(p)
    if p <= 2:
        return 1.0
    return (2 * n) ** (1.0 / p - 0.5)


def is_valid_lpa(n: int, p: float, a: float) -> LpaValidity:
    bound = lpa_bound(n, p)
    p = parse_p(p)
    regime = "1<=p<=2, 0<a<=1" if p <= 2 else "2<p<=inf, 0<a<=(2n)^(1/p-1/2)"
    return LpaValidity(valid=bool(0 < a <= bound), bound=bound, regime=regime)


def _require_valid(norm, n: int):
    if isinstance(norm, Lpa):
        v = is_valid_lpa(n, norm.p, norm.a)
        if not v.valid:
            raise InvalidNormError(
                f"N_(p={format_p(norm.p)}, a={norm.a}) is not a norm on H^{n}: "
                f"requires {v.regime}, bound {v.bound!r}",
                threshold=v.bound,
            )
    elif isinstance(norm, SubFinslerLift) and n != 1:
        raise DimensionError("sub-Finsler norms are supported on H^1 only")


def values(norm: NormDescriptor, z, t, strict: bool = True) -> np.ndarray:
    """Vectorized norm of points ``(z, t)``; ``z`` has shape ``(..., 2n)``.

    With ``strict=False`` invalid ``N_{p,a}`` parameters are evaluated anyway,
    which the counterexample constructions need.
    """
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    d = z.shape[-1]
    if d == 0 or d % 2:
        raise DimensionError(f"z must have even dimension, got {d}")
    if strict:
        _require_valid(norm, d // 2)
    match norm:
        case Koranyi():
            r2 = np.sum(z * z, axis=-1)
            return (r2 * r2 + t * t) ** 0.25
        case LeeNaor():
            r2 = np.sum(z * z, axis=-1)
            return np.sqrt(np.sqrt(r2 * r2 + t * t) + r2)
        case Lpa(p=p, a=a):
            return np.maximum(lp_norm(z, p), a * np.sqrt(np.abs(t)))
        case SubFinslerLift():
            if d != 2:
                raise DimensionError("sub-Finsler norms are supported on H^1 only")
            from .isoperimetrix import subfinsler_values

            return subfinsler_values(norm.planar, norm.resolution, z, t)
    raise TypeError(f"not a norm descriptor: {norm!r}")


def eval_norm(norm: NormDescriptor, p: HeisPoint, strict: bool = True) -> float:
    return float(values(norm, p.z, p.t, strict=strict))


def projected_norm(norm: NormDescriptor, z, strict: bool = True):
    """The vector norm ``|z| := N((z, 0))`` on R^{2n}."""
    z = np.asarray(z, dtype=float)
    match norm:
        case SubFinslerLift():
            if strict:
                _require_valid(norm, z.shape[-1] // 2)
            r = norm.planar.norm(z)
        case _:
            r = values(norm, z, np.zeros(z.shape[:-1]), strict=strict)
    return float(r) if np.ndim(r) == 0 else r


def lpa_witness_pair(n: int, p: float, a: float) -> tuple[HeisPoint, HeisPoint]:
    """The explicit pair attaining the triangle bound for ``N_{p,a}`` at the threshold.

    Both points have norm ``|z|_p``; the triangle defect is positive exactly
    when ``a > lpa_bound(n, p)``.
    """
    n = group.check_dim(n)
    p = parse_p(p)
    if p <= 2:
        t = 1.0 / a**2
        return HeisPoint(group.unit(n, 1), t), HeisPoint(-group.unit(n, n + 1), t)
    # omega(z, z') = 2n, the largest value allowed by |z|_2 |z'|_2
    t = (2 * n) ** (2.0 / p) / a**2
    ones = np.ones(n)
    return HeisPoint(np.ones(2 * n), t), HeisPoint(np.concatenate([ones, -ones]), t)


def lpa_split_witness(n: int, p: float, a: float) -> tuple[HeisPoint, HeisPoint]:
    """``(sum_{j<=n} e_j, n^{2/p}/a^2)`` and ``(-sum_{j>n} e_j, n^{2/p}/a^2)``.

    This pair only breaks the triangle inequality once ``a > n^{1/p - 1/2}``,
    which for ``p > 2`` lies above the sharp bound.
    """
    n = group.check_dim(n)
    p = parse_p(p)
    t = n ** (2.0 / p) / a**2
    ones = np.ones(n)
    zero = np.zeros(n)
    return HeisPoint(np.concatenate([ones, zero]), t), HeisPoint(np.concatenate([zero, -ones]), t)


def lpa_violation_witness(n: int, p: float, a: float) -> tuple[HeisPoint, HeisPoint]:
    v = is_valid_lpa(n, p, a)
    if v.valid:
        raise HeisenbergError(f"N_(p={format_p(parse_p(p))}, a={a}) is a norm on H^{n}; no violation exists")
    return lpa_witness_pair(n, p, a)


def triangle_defect(norm: NormDescriptor, g: HeisPoint, h: HeisPoint) -> float:
    """``N(g*h) - N(g) - N(h)``, positive when the triangle inequality fails."""
    return eval_norm(norm, g * h, strict=False) - eval_norm(norm, g, strict=False) - eval_norm(norm, h, strict=False)


@dataclass
class NormProbeReport:
    samples_tested: int
    worst_triangle_defect: float
    worst_symmetry_defect: float
    worst_homogeneity_defect: float
    tolerance: float
    witness: tuple[HeisPoint, HeisPoint] | None = None

    @property
    def holds(self) -> bool:
        return self.witness is None

    def to_dict(self):
        return {
            "samples_tested": self.samples_tested,
            "worst_triangle_defect": self.worst_triangle_defect,
            "worst_symmetry_defect": self.worst_symmetry_defect,
            "worst_homogeneity_defect": self.worst_homogeneity_defect,
            "tolerance": self.tolerance,
            "holds": self.holds,
            "witness": None if self.witness is None else [w.to_dict() for w in self.witness],
        }


def structured_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors, their negatives and the unit vertical points."""
    eye = np.eye(2 * n)
    z = np.concatenate([eye, -eye, np.zeros((2, 2 * n)), eye + np.roll(eye, n, axis=1)])
    t = np.concatenate([np.zeros(4 * n), [1.0, -1.0], np.ones(2 * n)])
    return z, t


def _structured_pairs(norm, n):
    z, t = structured_points(n)
    i, j = np.meshgrid(np.arange(len(t)), np.arange(len(t)), indexing="ij")
    z1, t1, z2, t2 = z[i.ravel()], t[i.ravel()], z[j.ravel()], t[j.ravel()]
    extra = []
    if isinstance(norm, Lpa):
        extra.append(lpa_witness_pair(n, norm.p, norm.a))
        extra.append(lpa_witness_pair(n, 2.0 if norm.p > 2 else 3.0, norm.a))
        tau = 1.0 / norm.a**2
        extra.append((HeisPoint(group.unit(n, 1), tau), HeisPoint(group.unit(n, 1), -tau)))
    # each point with its own inverse
    extra_z1 = [g.z for g, _ in extra] + list(z)
    extra_t1 = [g.t for g, _ in extra] + list(t)
    extra_z2 = [h.z for _, h in extra] + list(-z)
    extra_t2 = [h.t for _, h in extra] + list(-t)
    return (
        np.concatenate([z1, np.array(extra_z1)]),
        np.concatenate([t1, np.array(extra_t1)]),
        np.concatenate([z2, np.array(extra_z2)]),
        np.concatenate([t2, np.array(extra_t2)]),
    )


def probe_norm_axioms(
    norm: NormDescriptor,
    n: int,
    samples: int,
    seed: int = 0,
    radius: float = 10.0,
    tol: float = 1e-12,
    extra_pairs=(),
) -> NormProbeReport:
    """Worst triangle, symmetry and homogeneity defects over seeded samples.

    A structured batch (unit vectors, inverse pairs, the known extremal pairs of
    ``N_{p,a}``) is always evaluated before the uniform samples.
    """
    n = group.check_dim(n)
    if samples < 1:
        raise HeisenbergError("probe_norm_axioms needs at least one sample")
    rng = np.random.default_rng(seed)
    sz1, st1, sz2, st2 = _structured_pairs(norm, n)
    rz1, rt1 = group.random_points(rng, n, samples, radius)
    rz2, rt2 = group.random_points(rng, n, samples, radius)
    parts = [(sz1, st1, sz2, st2), (rz1, rt1, rz2, rt2)]
    for g, h in extra_pairs:
        parts.insert(0, (g.z[None], np.array([g.t]), h.z[None], np.array([h.t])))
    z1 = np.concatenate([p[0] for p in parts])
    t1 = np.concatenate([p[1] for p in parts])
    z2 = np.concatenate([p[2] for p in parts])
    t2 = np.concatenate([p[3] for p in parts])

    n1 = values(norm, z1, t1, strict=False)
    n2 = values(norm, z2, t2, strict=False)
    zp, tp = group.multiply_arrays(z1, t1, z2, t2)
    tri = values(norm, zp, tp, strict=False) - n1 - n2
    k = int(np.argmax(tri))
    worst_tri = float(tri[k])

    sym = np.abs(values(norm, -z1, -t1, strict=False) - n1)

    lam = 10.0 ** rng.uniform(-3, 3, size=len(t1))
    dz, dt = group.dilate_arrays(lam, z1, t1)
    scaled = lam * n1
    hom = np.abs(values(norm, dz, dt, strict=False) - scaled) / np.where(scaled > 0, scaled, 1.0)

    witness = None
    if worst_tri > tol:
        witness = (HeisPoint(z1[k], t1[k]), HeisPoint(z2[k], t2[k]))
    return NormProbeReport(
        samples_tested=int(len(t1)),
        worst_triangle_defect=worst_tri,
        worst_symmetry_defect=float(np.max(sym)),
        worst_homogeneity_defect=float(np.max(hom)),
        tolerance=tol,
        witness=witness,
    )


def check_horiz_dominance(norm: NormDescriptor, n: int, samples: int, seed: int = 0, radius: float = 10.0) -> float:
    """Worst ``N((z, 0)) - N((z, t))`` over structured and uniform samples."""
    n = group.check_dim(n)
    rng = np.random.default_rng(seed)
    sz, st = structured_points(n)
    rz, rt = group.random_points(rng, n, samples, radius)
    z = np.concatenate([sz, rz])
    t = np.concatenate([st, rt])
    horiz = projected_norm(norm, z, strict=False)
    full = values(norm, z, t, strict=False)
    return float(np.max(horiz - full))


# --- parsing -----------------------------------------------------------------


def _parse_kv(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise HeisenbergError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_planar(text: str) -> PlanarNorm:
    """``lp:p=3`` or ``poly:x1 y1;x2 y2;...``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "lp":
        kv = _parse_kv(rest)
        return LpPlanar(parse_p(kv.get("p", "2")))
    if kind in ("poly", "polygonal"):
        from .planar import PolygonalPlanar

        verts = [tuple(float(c) for c in pt.replace(",", " ").split()) for pt in rest.split(";") if pt.strip()]
        return PolygonalPlanar(tuple(verts))
    raise HeisenbergError(f"unknown planar norm {text!r}")


def parse_norm(text: str) -> NormDescriptor:
    """Parse the CLI syntax, e.g. ``koranyi``, ``lpa:p=inf,a=0.5`` or ``subfinsler:p=3,resolution=512``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("koranyi", "korányi"):
        return Koranyi()
    if kind in ("leenaor", "lee-naor"):
        return LeeNaor()
    if kind == "lpa":
        kv = _parse_kv(rest)
        if "p" not in kv or "a" not in kv:
            raise HeisenbergError("lpa norm needs both p and a, e.g. lpa:p=2,a=1")
        return Lpa(parse_p(kv["p"]), float(kv["a"]))
    if kind == "subfinsler":
        kv = _parse_kv(rest)
        res = int(kv.pop("resolution", 1024))
        return SubFinslerLift(LpPlanar(parse_p(kv.get("p", "2"))), res)
    raise HeisenbergError(f"unknown norm kind {kind!r}")


def norm_from_dict(data: dict) -> NormDescriptor:
    if not isinstance(data, dict) or "kind" not in data:
        raise HeisenbergError("norm JSON needs a 'kind' field")
    kind = data["kind"]
    if kind == "koranyi":
        return Koranyi()
    if kind == "leenaor":
        return LeeNaor()
    if kind == "lpa":
        for key in ("p", "a"):
            if key not in data:
                raise HeisenbergError(f"norm JSON field {key!r} is missing")
        return Lpa(parse_p(data["p"]), data["a"])
    if kind == "subfinsler":
        if "planar" not in data:
            raise HeisenbergError("norm JSON field 'planar' is missing")
        return SubFinslerLift(planar_from_dict(data["planar"]), data.get("resolution", 1024))
    raise HeisenbergError(f"norm JSON field 'kind' has unknown value {kind!r}")
