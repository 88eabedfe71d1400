"""
Canonical closed convex sets and their metric projections.

Halfspaces, hyperplanes, boxes, balls and affine subspaces project in closed
form. Finite intersections project with Dykstra's algorithm, which (unlike
plain alternating projections) converges to the nearest point of the
intersection rather than to an arbitrary member.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from .exceptions import DimensionMismatch, InvalidParameter, ProjectionNotConverged
from .geometry import Point, Tolerance, dist, finite_scalar, inner, norm_sq

logger = logging.getLogger(__name__)


class ConvexSet(ABC):
    kind = None

    @property
    @abstractmethod
    def dim(self):
        ...

    @abstractmethod
    def project(self, x):
        """Return the unique nearest member of the set."""

    @abstractmethod
    def to_json(self):
        ...

    def describe(self):
        return f"{self.kind}({self.dim}-d)"

    def contains(self, x, tol=None):
        self._check_dim(x)
        if tol is None:
            tol = Tolerance.default().atol
        return dist(x, self.project(x)) <= tol

    def _check_dim(self, x):
        if x.dim != self.dim:
            raise DimensionMismatch(f"{self.describe()} cannot take a {x.dim}-d point")

    @staticmethod
    def from_json(data):
        try:
            kind = data['kind']
        except (KeyError, TypeError):
            raise InvalidParameter(f"a convex set needs a 'kind', got {data!r}")
        try:
            factory = CONVEX_SET_KINDS[kind]
        except KeyError:
            raise InvalidParameter(f"unknown convex set kind {kind!r}, choose from {sorted(CONVEX_SET_KINDS)}")
        try:
            return factory(data)
        except KeyError as exc:
            raise InvalidParameter(f"convex set {kind!r} is missing the field {exc}")
        except TypeError:
            raise InvalidParameter(f"convex set {kind!r} has malformed fields: {data!r}")


def _normal(vector, name):
    normal = Point.from_json(vector) if isinstance(vector, list) else vector
    if norm_sq(normal) == 0.0:
        raise InvalidParameter(f"{name} must be a non-zero vector")
    return normal


class Halfspace(ConvexSet):
    """The set {x : <a, x> <= b}."""

    kind = 'halfspace'

    def __init__(self, normal, offset):
        self.normal = _normal(normal, 'halfspace normal')
        self.offset = finite_scalar(offset, 'halfspace offset')

    @property
    def dim(self):
        return self.normal.dim

    def project(self, x):
        self._check_dim(x)
        excess = inner(self.normal, x) - self.offset
        if excess <= 0.0:
            return x
        return x - (excess / norm_sq(self.normal)) * self.normal

    def to_json(self):
        return {'kind': self.kind, 'normal': self.normal.to_json(), 'offset': self.offset}


class Hyperplane(ConvexSet):
    """The set {x : <a, x> = b}."""

    kind = 'hyperplane'

    def __init__(self, normal, offset):
        self.normal = _normal(normal, 'hyperplane normal')
        self.offset = finite_scalar(offset, 'hyperplane offset')

    @property
    def dim(self):
        return self.normal.dim

    def project(self, x):
        self._check_dim(x)
        excess = inner(self.normal, x) - self.offset
        return x - (excess / norm_sq(self.normal)) * self.normal

    def to_json(self):
        return {'kind': self.kind, 'normal': self.normal.to_json(), 'offset': self.offset}


class Box(ConvexSet):
    kind = 'box'

    def __init__(self, lower, upper):
        self.lower = Point(lower) if not isinstance(lower, Point) else lower
        self.upper = Point(upper) if not isinstance(upper, Point) else upper
        if self.lower.dim != self.upper.dim:
            raise DimensionMismatch("box corners must have the same dimension")
        if np.any(self.lower.coords > self.upper.coords):
            raise InvalidParameter(f"box is empty: lower {self.lower.to_json()} exceeds upper {self.upper.to_json()}")

    @property
    def dim(self):
        return self.lower.dim

    def project(self, x):
        self._check_dim(x)
        return Point(np.clip(x.coords, self.lower.coords, self.upper.coords))

    def to_json(self):
        return {'kind': self.kind, 'lower': self.lower.to_json(), 'upper': self.upper.to_json()}


class Ball(ConvexSet):
    """Closed ball. A radius of zero is the singleton {center}."""

    kind = 'ball'

    def __init__(self, center, radius):
        self.center = Point(center) if not isinstance(center, Point) else center
        self.radius = finite_scalar(radius, 'ball radius')
        if self.radius < 0.0:
            raise InvalidParameter(f"ball radius must be non-negative, got {self.radius!r}")

    @property
    def dim(self):
        return self.center.dim

    def project(self, x):
        self._check_dim(x)
        offset = x - self.center
        length = math.sqrt(norm_sq(offset))
        if length <= self.radius:
            return x
        return self.center + (self.radius / length) * offset

    def to_json(self):
        return {'kind': self.kind, 'center': self.center.to_json(), 'radius': self.radius}


def orthonormalize(vectors, rank_tol=1e-10):
    """Gram-Schmidt with one re-orthogonalization pass; fails on rank deficiency."""
    basis = []
    for vector in vectors:
        v = np.array(vector.coords, dtype=np.float64)
        original = np.linalg.norm(v)
        for _ in range(2):
            for e in basis:
                v = v - np.dot(e, v) * e
        length = np.linalg.norm(v)
        if original == 0.0 or length <= rank_tol * original:
            raise InvalidParameter("affine subspace basis is rank deficient")
        basis.append(v / length)
    return [Point(e) for e in basis]


class AffineSubspace(ConvexSet):
    """``anchor + span(basis)``; the basis is orthonormalized on construction."""

    kind = 'affine'

    def __init__(self, anchor, basis):
        self.anchor = Point(anchor) if not isinstance(anchor, Point) else anchor
        self.spanning = [Point(b) if not isinstance(b, Point) else b for b in basis]
        for vector in self.spanning:
            if vector.dim != self.anchor.dim:
                raise DimensionMismatch("affine basis vectors must match the anchor dimension")
        if len(self.spanning) > self.anchor.dim:
            raise InvalidParameter("affine subspace basis is rank deficient")
        self.basis = orthonormalize(self.spanning)

    @property
    def dim(self):
        return self.anchor.dim

    def project(self, x):
        self._check_dim(x)
        offset = x - self.anchor
        result = self.anchor
        for e in self.basis:
            result = result + inner(offset, e) * e
        return result

    def to_json(self):
        return {'kind': self.kind, 'anchor': self.anchor.to_json(),
                'basis': [vector.to_json() for vector in self.spanning]}


@dataclass(frozen=True)
class ProjectionResult:
    point: Point
    residual: float
    iterations: int


def dykstra(sets, x, tol=None, max_iters=None):
    """
    Dykstra's alternating projection onto the intersection of ``sets``.

    The residual is the largest single-projection displacement of a full sweep.
    Never raises on the iteration cap; compare ``residual`` with ``tol``.
    """
    tol = settings.CAP_DYKSTRA_TOL if tol is None else tol
    max_iters = settings.CAP_DYKSTRA_MAX_ITERS if max_iters is None else max_iters
    current = x.coords
    increments = [np.zeros_like(current) for _ in sets]
    residual = math.inf
    sweeps = 0
    while sweeps < max_iters:
        sweeps += 1
        residual = 0.0
        for index, convex_set in enumerate(sets):
            shifted = current + increments[index]
            projected = convex_set.project(Point(shifted)).coords
            increments[index] = shifted - projected
            residual = max(residual, float(np.linalg.norm(projected - current)))
            current = projected
        if residual <= tol:
            break
    logger.debug("dykstra finished after %d sweeps with residual %.3e", sweeps, residual)
    return ProjectionResult(point=Point(current), residual=residual, iterations=sweeps)


class Intersection(ConvexSet):
    """
    Finite intersection of convex sets.

    Non-emptiness cannot be verified in general and is the caller's
    responsibility.
    """

    kind = 'intersection'

    def __init__(self, sets):
        self.sets = list(sets)
        if not self.sets:
            raise InvalidParameter("an intersection needs at least one set")
        if len({s.dim for s in self.sets}) > 1:
            raise DimensionMismatch("intersected sets must share one dimension")

    @property
    def dim(self):
        return self.sets[0].dim

    def contains(self, x, tol=None):
        return all(s.contains(x, tol) for s in self.sets)

    def project_with_residual(self, x):
        self._check_dim(x)
        return dykstra(self.sets, x)

    def project(self, x):
        result = self.project_with_residual(x)
        if result.residual > settings.CAP_DYKSTRA_TOL:
            logger.warning("dykstra stopped at its cap with residual %.3e", result.residual)
            raise ProjectionNotConverged(result.point, result.residual, result.iterations)
        return result.point

    def to_json(self):
        return {'kind': self.kind, 'sets': [s.to_json() for s in self.sets]}

    def describe(self):
        return f"intersection[{', '.join(s.describe() for s in self.sets)}]"


CONVEX_SET_KINDS = {
    'halfspace': lambda data: Halfspace(data['normal'], data['offset']),
    'hyperplane': lambda data: Hyperplane(data['normal'], data['offset']),
    'box': lambda data: Box(data['lower'], data['upper']),
    'ball': lambda data: Ball(data['center'], data['radius']),
    'affine': lambda data: AffineSubspace(data['anchor'], data.get('basis', [])),
    'intersection': lambda data: Intersection(ConvexSet.from_json(item) for item in data['sets']),
}


def variational_gap(s, x, z, tol=None):
    """
    Return <x - Px, Px - z> for a member ``z`` of ``s``.

    For an exact projection the value is never negative.
    """
    if tol is None:
        tol = Tolerance.default().atol
    if not s.contains(z, tol):
        raise InvalidParameter(f"reference point {z.to_json()} is not a member of {s.describe()}")
    projected = s.project(x)
    return inner(x - projected, projected - z)
