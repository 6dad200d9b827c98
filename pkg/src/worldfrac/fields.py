"""Scalar arithmetic over the real numbers, complex numbers and quaternions.

A scalar is stored as its ``d`` real components, where ``d`` is the real
dimension of a ray over that field (1, 2 or 4).  Quaternion components are
ordered ``(w, x, y, z)`` for ``w + x i + y j + z k``.

The array helpers (:func:`mul_components`, :func:`conj_components`) work on
arrays of shape ``(..., d)`` and are what the rest of the package uses on
whole state vectors; :class:`Scalar` is the user-facing value type.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .regions import Region, DegenerateRegionError


class FieldMismatchError(ValueError):
    """Raised when values over different scalar fields are combined."""


class ScalarField(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    QUATERNION = "quaternion"

    @property
    def ray_dim(self) -> int:
        """Real dimension of a ray (one-dimensional subspace) over this field."""
        return _RAY_DIM[self]

    @classmethod
    def parse(cls, name: str | ScalarField) -> ScalarField:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(
                f"unknown field {name!r}; expected one of "
                f"{[f.value for f in cls]}") from None


_RAY_DIM = {ScalarField.REAL: 1, ScalarField.COMPLEX: 2, ScalarField.QUATERNION: 4}


def mul_components(field: ScalarField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Field product of component arrays of shape ``(..., d)`` (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if field is ScalarField.REAL:
        return a * b
    if field is ScalarField.COMPLEX:
        ar, ai = a[..., 0], a[..., 1]
        br, bi = b[..., 0], b[..., 1]
        return np.stack([ar * br - ai * bi, ar * bi + ai * br], axis=-1)
    # Hamilton product
    aw, ax, ay, az = (a[..., k] for k in range(4))
    bw, bx, by, bz = (b[..., k] for k in range(4))
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def conj_components(field: ScalarField, a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    if field is not ScalarField.REAL:
        a[..., 1:] *= -1.0
    return a


def left_mul_matrix(field: ScalarField, a: np.ndarray) -> np.ndarray:
    """Real ``d x d`` matrix of ``x -> a x`` acting on component vectors."""
    d = field.ray_dim
    return mul_components(field, np.asarray(a, dtype=float), np.eye(d)).T


def right_mul_matrix(field: ScalarField, a: np.ndarray) -> np.ndarray:
    """Real ``d x d`` matrix of ``x -> x a`` acting on component vectors."""
    d = field.ray_dim
    return mul_components(field, np.eye(d), np.asarray(a, dtype=float)).T


@dataclass(frozen=True)
class Scalar:
    """An element of R, C or H, held as a tuple of real components."""

    field: ScalarField
    components: tuple[float, ...]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != self.field.ray_dim:
            raise ValueError(
                f"{self.field.value} scalar needs {self.field.ray_dim} "
                f"components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def real(cls, x: float) -> Scalar:
        return cls(ScalarField.REAL, (x,))

    @classmethod
    def complex(cls, z: complex) -> Scalar:
        z = complex(z)
        return cls(ScalarField.COMPLEX, (z.real, z.imag))

    @classmethod
    def quaternion(cls, w: float, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> Scalar:
        return cls(ScalarField.QUATERNION, (w, x, y, z))

    @classmethod
    def one(cls, field: ScalarField) -> Scalar:
        return cls(field, (1.0,) + (0.0,) * (field.ray_dim - 1))

    @classmethod
    def from_array(cls, field: ScalarField, arr: Sequence[float]) -> Scalar:
        return cls(field, tuple(np.asarray(arr, dtype=float).ravel()))

    def as_array(self) -> np.ndarray:
        return np.array(self.components)

    def _check(self, other: Scalar) -> None:
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatchError(
                f"cannot combine {self.field.value} and {other.field.value} scalars")

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Scalar(self.field, tuple(c * other for c in self.components))
        self._check(other)
        prod = mul_components(self.field, self.as_array(), other.as_array())
        return Scalar.from_array(self.field, prod)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __add__(self, other: Scalar) -> Scalar:
        self._check(other)
        return Scalar(self.field, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: Scalar) -> Scalar:
        return self + (-other)

    def __neg__(self) -> Scalar:
        return Scalar(self.field, tuple(-c for c in self.components))

    def conj(self) -> Scalar:
        return Scalar.from_array(self.field, conj_components(self.field, self.as_array()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def inverse(self) -> Scalar:
        n2 = sum(c * c for c in self.components)
        if n2 == 0.0:
            raise ZeroDivisionError("zero scalar has no inverse")
        return self.conj() * (1.0 / n2)

    def isclose(self, other: Scalar, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.components, other.components, rtol=0.0, atol=atol))

    def __complex__(self) -> complex:
        if self.field is ScalarField.QUATERNION:
            raise TypeError("quaternion scalar has no complex value")
        return complex(*self.components) if len(self.components) == 2 else complex(self.components[0])


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    """Product ``a * b``; non-commutative for quaternions."""
    a._check(b)
    return a * b


def scalar_norm(a: Scalar) -> float:
    return a.norm()


# -- random streams ---------------------------------------------------------

def rng_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators keyed by ``(seed, stream index)``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(s) for s in children]


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def sample_region_components(region: Region, d: int, n: int,
                             rng: np.random.Generator,
                             batch: int = 1 << 16) -> np.ndarray:
    """``n`` i.i.d. uniform points of ``region`` in R^d, shape ``(n, d)``.

    Rejection sampling from the region's bounding box.
    """
    region.validate(d)
    lo, hi = region.bounding_box(d)
    accept = region.measure(d) / float(np.prod(hi - lo))
    out = np.empty((n, d))
    filled = 0
    while filled < n:
        want = n - filled
        m = max(min(batch, int(want / accept * 1.1) + 16), 16)
        pts = lo + (hi - lo) * rng.random((m, d))
        pts = pts[region.contains(pts)]
        take = min(want, len(pts))
        out[filled:filled + take] = pts[:take]
        filled += take
    return out


def sample_uniform_scalar_region(field: ScalarField, region: Region, rng_seed: int,
                                 n: int | None = None, stream: int = 0,
                                 ) -> Iterator[Scalar] | np.ndarray:
    """Uniform samples of scalars whose components lie in ``region``.

    With ``n`` given, returns an ``(n, d)`` component array.  Without it,
    returns an endless iterator of :class:`Scalar` values.  The output is a
    pure function of ``(rng_seed, stream)``.
    """
    field = ScalarField.parse(field)
    d = field.ray_dim
    region.validate(d)
    rng = rng_for(rng_seed, stream)
    if n is not None:
        return sample_region_components(region, d, n, rng)

    def _stream():
        while True:
            for row in sample_region_components(region, d, 4096, rng):
                yield Scalar.from_array(field, row)
    return _stream()


__all__ = [
    "ScalarField", "Scalar", "FieldMismatchError", "DegenerateRegionError",
    "mul_components", "conj_components", "left_mul_matrix", "right_mul_matrix",
    "scalar_mul", "scalar_norm", "rng_streams", "rng_for",
    "sample_region_components", "sample_uniform_scalar_region",
]
