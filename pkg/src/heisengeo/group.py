"""Arithmetic of the Heisenberg group H^n = R^{2n} x R.

Coordinates are ``z = (x_1..x_n, y_1..y_n)`` and a vertical coordinate ``t``.
The product is ``(z, t) * (z', t') = (z + z', t + t' + 2 omega(z, z'))`` with
``omega(z, z') = <z, J_n z'> = y.x' - x.y'``.

Every function here has a scalar form working on :class:`HeisPoint` and an
array form (suffix ``_arrays``) that broadcasts over leading axes; the probes
in the other modules use the latter.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, HeisenbergError


class HeisPoint:
    """Immutable point of H^n."""

    __slots__ = ("_z", "_t")

    def __init__(self, z: Iterable[float], t: float = 0.0):
        arr = np.array(z, dtype=float).reshape(-1)
        if arr.size == 0 or arr.size % 2:
            raise DimensionError(f"z must have even positive length, got {arr.size}")
        t = float(t)
        if not (np.all(np.isfinite(arr)) and math.isfinite(t)):
            raise HeisenbergError("coordinates must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "_z", arr)
        object.__setattr__(self, "_t", t)

    def __setattr__(self, name, value):
        raise AttributeError("HeisPoint is immutable")

    @property
    def z(self) -> np.ndarray:
        return self._z

    @property
    def t(self) -> float:
        return self._t

    @property
    def n(self) -> int:
        return self._z.size // 2

    @property
    def x(self) -> np.ndarray:
        return self._z[: self.n]

    @property
    def y(self) -> np.ndarray:
        return self._z[self.n :]

    @classmethod
    def identity(cls, n: int) -> "HeisPoint":
        return cls(np.zeros(2 * check_dim(n)), 0.0)

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> "HeisPoint":
        """Build from a flat ``(x_1..x_n, y_1..y_n, t)`` sequence."""
        c = np.asarray(coords, dtype=float).reshape(-1)
        if c.size < 3 or c.size % 2 == 0:
            raise DimensionError(f"expected 2n+1 coordinates, got {c.size}")
        return cls(c[:-1], c[-1])

    def coords(self) -> np.ndarray:
        return np.append(self._z, self._t)

    def to_dict(self) -> dict:
        return {"z": [float(v) for v in self._z], "t": self._t}

    @classmethod
    def from_dict(cls, data: dict) -> "HeisPoint":
        try:
            z, t = data["z"], data["t"]
        except (KeyError, TypeError) as exc:
            raise HeisenbergError(f"point JSON is missing field {exc}") from None
        return cls(z, t)

    def allclose(self, other: "HeisPoint", atol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and bool(np.all(np.abs(self._z - other._z) <= atol))
            and abs(self._t - other._t) <= atol
        )

    def __eq__(self, other):
        if not isinstance(other, HeisPoint):
            return NotImplemented
        return self._t == other._t and np.array_equal(self._z, other._z)

    def __hash__(self):
        return hash((self._z.tobytes(), self._t))

    def __repr__(self):
        return f"HeisPoint(z={self._z.tolist()}, t={self._t!r})"

    def __mul__(self, other: "HeisPoint") -> "HeisPoint":
        return multiply(self, other)


def check_dim(n) -> int:
    if int(n) != n or n < 1:
        raise DimensionError(f"group dimension must be a positive integer, got {n!r}")
    return int(n)


def unit(n: int, j: int) -> np.ndarray:
    """Standard basis vector e_j of R^{2n} (1-based, as in the usual notation)."""
    if not 1 <= j <= 2 * n:
        raise DimensionError(f"e_{j} does not exist in R^{2 * n}")
    e = np.zeros(2 * n)
    e[j - 1] = 1.0
    return e


def omega(z, w) -> np.ndarray | float:
    """Symplectic form ``<z, J_n w>``, broadcasting over leading axes."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    d = z.shape[-1]
    if d != w.shape[-1]:
        raise DimensionError(f"dimension mismatch: {d} vs {w.shape[-1]}")
    if d == 0 or d % 2:
        raise DimensionError(f"symplectic form needs even dimension, got {d}")
    n = d // 2
    val = np.sum(z[..., n:] * w[..., :n], axis=-1) - np.sum(z[..., :n] * w[..., n:], axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def j_matrix(n: int) -> np.ndarray:
    """Dense J_n; only used by oracles and the homomorphism checks."""
    n = check_dim(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def multiply_arrays(z1, t1, z2, t2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return z1 + z2, np.asarray(t1) + np.asarray(t2) + 2.0 * omega(z1, z2)


def inverse_arrays(z, t):
    return -np.asarray(z, dtype=float), -np.asarray(t, dtype=float)


def dilate_arrays(lam, z, t):
    lam = np.asarray(lam, dtype=float)
    return np.asarray(z) * lam[..., None], np.asarray(t) * lam**2


def multiply(p: HeisPoint, q: HeisPoint) -> HeisPoint:
    if p.n != q.n:
        raise DimensionError(f"cannot multiply points of H^{p.n} and H^{q.n}")
    z, t = multiply_arrays(p.z, p.t, q.z, q.t)
    return HeisPoint(z, float(t))


def inverse(p: HeisPoint) -> HeisPoint:
    return HeisPoint(-p.z, -p.t)


def dilate(lam: float, p: HeisPoint) -> HeisPoint:
    if not lam > 0:
        raise HeisenbergError(f"dilation factor must be positive, got {lam}")
    return HeisPoint(lam * p.z, lam * lam * p.t)


def left_translate(g: HeisPoint, p: HeisPoint) -> HeisPoint:
    return multiply(g, p)


def distance(norm, p: HeisPoint, q: HeisPoint) -> float:
    """Left-invariant distance ``N(p^{-1} * q)``."""
    from .norms import eval_norm

    return eval_norm(norm, multiply(inverse(p), q))


def random_points(rng: np.random.Generator, n: int, size: int, radius: float = 10.0):
    """Uniform samples in the box [-radius, radius]^{2n+1}, as ``(z, t)`` arrays."""
    c = rng.uniform(-radius, radius, size=(size, 2 * n + 1))
    return c[:, :-1], c[:, -1]
