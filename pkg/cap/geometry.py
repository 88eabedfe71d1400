"""
Finite-dimensional Hilbert space primitives.

Everything here works in R^n with the dot product, in 64-bit floating point.
Points are immutable: every operation returns a fresh :class:`Point`.
"""
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from .exceptions import DimensionMismatch, InvalidParameter


class Point:
    """An immutable vector of finite reals."""

    __slots__ = ('_coords',)

    def __init__(self, coords):
        try:
            array = np.array(coords, dtype=np.float64)
        except (TypeError, ValueError):
            raise InvalidParameter(f"point coordinates must be real numbers, got {coords!r}")
        if array.ndim == 0:
            array = array.reshape(1)
        if array.ndim != 1 or array.size == 0:
            raise InvalidParameter(f"a point needs a flat, non-empty coordinate list, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidParameter(f"point coordinates must be finite, got {array.tolist()}")
        array.setflags(write=False)
        self._coords = array

    @classmethod
    def of(cls, *coords):
        return cls(coords)

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list) or not all(_is_number(value) for value in data):
            raise InvalidParameter(f"a point is serialized as a JSON array of numbers, got {data!r}")
        return cls(data)

    @property
    def coords(self):
        return self._coords

    @property
    def dim(self):
        return self._coords.size

    def to_json(self):
        return [float(value) for value in self._coords]

    def __len__(self):
        return self.dim

    def __getitem__(self, index):
        return float(self._coords[index])

    def __iter__(self):
        return (float(value) for value in self._coords)

    def __add__(self, other):
        require_same_dim(self, other)
        return Point(self._coords + other.coords)

    def __sub__(self, other):
        require_same_dim(self, other)
        return Point(self._coords - other.coords)

    def __neg__(self):
        return Point(-self._coords)

    def __mul__(self, factor):
        return Point(self._coords * float(factor))

    __rmul__ = __mul__

    def __truediv__(self, factor):
        return Point(self._coords / float(factor))

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return np.array_equal(self._coords, other.coords)

    def __hash__(self):
        return hash(self._coords.tobytes())

    def __repr__(self):
        return f"Point({', '.join(repr(value) for value in self)})"



def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Tolerance:
    """Absolute-plus-relative tolerance: ``atol + rtol * scale``."""

    atol: float
    rtol: float

    @classmethod
    def default(cls, atol=None):
        """``CAP_ATOL``, or a caller's absolute tolerance, with ``CAP_RTOL``."""
        return cls(atol=settings.CAP_ATOL if atol is None else float(atol), rtol=settings.CAP_RTOL)

    def bound(self, scale=0.0):
        return self.atol + self.rtol * abs(scale)

    def close(self, a, b):
        return abs(a - b) <= self.bound(max(abs(a), abs(b)))


def finite_scalar(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise InvalidParameter(f"{name} must be finite, got {value!r}")
    return value


def require_same_dim(*points):
    dims = {point.dim for point in points}
    if len(dims) > 1:
        raise DimensionMismatch(f"points of different dimensions cannot be combined: {sorted(dims)}")
    return dims.pop()


def inner(u, v):
    require_same_dim(u, v)
    return float(np.dot(u.coords, v.coords))


def norm_sq(u):
    return inner(u, u)


def norm(u):
    return math.sqrt(norm_sq(u))


def dist(u, v):
    return math.sqrt(norm_sq(u - v))


def polarization_gap(u, v, p, w):
    """
    Defect of the identity 2<u-v, p-w> = |u-w|^2 + |v-p|^2 - |u-p|^2 - |v-w|^2.

    Zero up to rounding for every input; it exists so the identity can be asserted.
    """
    require_same_dim(u, v, p, w)
    left = 2.0 * inner(u - v, p - w)
    right = norm_sq(u - w) + norm_sq(v - p) - norm_sq(u - p) - norm_sq(v - w)
    return left - right


def mann_combination(x, tx, alpha):
    """Return ``(1 - alpha) * x + alpha * tx`` for ``alpha`` strictly inside (0, 1)."""
    alpha = finite_scalar(alpha, 'alpha')
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter(f"step {alpha!r} outside (0,1)")
    require_same_dim(x, tx)
    return Point((1.0 - alpha) * x.coords + alpha * tx.coords)
