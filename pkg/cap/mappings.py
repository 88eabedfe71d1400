"""
Mapping catalog, domains and the hybrid-class verifiers.

Every verifier works on a finite sample of pairs and says so: a
``holds-on-sample`` verdict is evidence for the inequality, never a proof of
it on the whole domain.
"""
import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from django.conf import settings

from .exceptions import DimensionMismatch, DomainError, FixedPointError, InvalidParameter
from .geometry import Point, Tolerance, dist, finite_scalar
from .projection import AffineSubspace, Ball, Box, ConvexSet, Halfspace

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_COUNT = 41

HOLDS = 'holds-on-sample'
VIOLATED = 'violated'


def _default_tol(tol):
    return settings.CAP_ATOL if tol is None else float(tol)


def _as_point(value):
    return value if isinstance(value, Point) else Point(value)


def _extended_real(value, name):
    """A real number or an infinite end, given as a number or as "inf"/"-inf"."""
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a number, \"inf\" or \"-inf\", got {value!r}")


# Domains

class DomainSpec(ABC):
    kind = None
    is_convex = True

    @property
    @abstractmethod
    def dim(self):
        ...

    @abstractmethod
    def contains(self, x, tol=None):
        ...

    @abstractmethod
    def grid(self, count):
        ...

    @abstractmethod
    def random(self, count, rng):
        ...

    @abstractmethod
    def to_json(self):
        ...

    def as_convex_set(self):
        """The domain as a closed convex set, or None when it is not one."""
        return None

    def describe(self):
        return f"{self.kind}({self.dim}-d)"

    def sample(self, count=None, seed=None):
        """Grid points when ``seed`` is None, seeded uniform points otherwise."""
        count = DEFAULT_SAMPLE_COUNT if count is None else int(count)
        if count < 1:
            raise InvalidParameter(f"sample count must be positive, got {count}")
        if seed is None:
            return self.grid(count)
        return self.random(count, np.random.default_rng(seed))

    def _check_dim(self, x):
        if x.dim != self.dim:
            raise DimensionMismatch(f"{self.describe()} cannot take a {x.dim}-d point")

    def __eq__(self, other):
        return isinstance(other, DomainSpec) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    @staticmethod
    def from_json(data):
        try:
            kind = data['kind']
        except (KeyError, TypeError):
            raise InvalidParameter(f"a domain needs a 'kind', got {data!r}")
        try:
            factory = DOMAIN_KINDS[kind]
        except KeyError:
            raise InvalidParameter(f"unknown domain kind {kind!r}, choose from {sorted(DOMAIN_KINDS)}")
        try:
            return factory(data)
        except KeyError as exc:
            raise InvalidParameter(f"domain {kind!r} is missing the field {exc}")
        except TypeError:
            raise InvalidParameter(f"domain {kind!r} has malformed fields: {data!r}")


class BoxDomain(DomainSpec):
    kind = 'box'

    def __init__(self, lower, upper):
        self.box = Box(lower, upper)

    @property
    def dim(self):
        return self.box.dim

    def contains(self, x, tol=None):
        self._check_dim(x)
        return self.box.contains(x, _default_tol(tol))

    def grid(self, count):
        axes = [np.linspace(lo, hi, count) for lo, hi in zip(self.box.lower.coords, self.box.upper.coords)]
        return [Point(coords) for coords in itertools.product(*axes)]

    def random(self, count, rng):
        return [Point(row) for row in rng.uniform(self.box.lower.coords, self.box.upper.coords,
                                                  size=(count, self.dim))]

    def as_convex_set(self):
        return self.box

    def to_json(self):
        return {'kind': self.kind, 'lower': self.box.lower.to_json(), 'upper': self.box.upper.to_json()}


class BallDomain(DomainSpec):
    kind = 'ball'

    def __init__(self, center, radius):
        self.ball = Ball(center, radius)

    @property
    def dim(self):
        return self.ball.dim

    def contains(self, x, tol=None):
        self._check_dim(x)
        return self.ball.contains(x, _default_tol(tol))

    def grid(self, count):
        center, radius = self.ball.center.coords, self.ball.radius
        axes = [np.linspace(c - radius, c + radius, count) for c in center]
        points = (Point(coords) for coords in itertools.product(*axes))
        return [point for point in points if self.contains(point, 0.0)]

    def random(self, count, rng):
        directions = rng.normal(size=(count, self.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.ball.radius * rng.uniform(size=(count, 1)) ** (1.0 / self.dim)
        return [Point(row) for row in self.ball.center.coords + radii * directions]

    def as_convex_set(self):
        return self.ball

    def to_json(self):
        return {'kind': self.kind, 'center': self.ball.center.to_json(), 'radius': self.ball.radius}


class IntervalDomain(DomainSpec):
    """
    A one-dimensional interval whose ends may be infinite.

    Sampling needs a finite range, so infinite ends are replaced by
    ``-window``/``+window``.
    """

    kind = 'interval'

    def __init__(self, lower=-math.inf, upper=math.inf, window=1.0):
        self.lower = _extended_real(lower, 'interval lower end')
        self.upper = _extended_real(upper, 'interval upper end')
        self.window = finite_scalar(window, 'interval window')
        if math.isnan(self.lower) or math.isnan(self.upper) or self.lower > self.upper:
            raise InvalidParameter(f"interval [{lower}, {upper}] is empty")
        if self.window <= 0.0:
            raise InvalidParameter("interval window must be positive")

    @property
    def dim(self):
        return 1

    @property
    def sample_range(self):
        lower = self.lower if math.isfinite(self.lower) else min(-self.window, self.upper)
        upper = self.upper if math.isfinite(self.upper) else max(self.window, lower)
        return lower, upper

    def contains(self, x, tol=None):
        self._check_dim(x)
        tol = _default_tol(tol)
        return self.lower - tol <= x[0] <= self.upper + tol

    def grid(self, count):
        lower, upper = self.sample_range
        return [Point(value) for value in np.linspace(lower, upper, count)]

    def random(self, count, rng):
        lower, upper = self.sample_range
        return [Point(value) for value in rng.uniform(lower, upper, size=count)]

    def as_convex_set(self):
        bounded_below, bounded_above = math.isfinite(self.lower), math.isfinite(self.upper)
        if bounded_below and bounded_above:
            return Box([self.lower], [self.upper])
        if bounded_above:
            return Halfspace([1.0], self.upper)
        if bounded_below:
            return Halfspace([-1.0], -self.lower)
        return AffineSubspace([0.0], [[1.0]])

    def to_json(self):
        def end(value):
            return value if math.isfinite(value) else ('-inf' if value < 0 else 'inf')
        return {'kind': self.kind, 'lower': end(self.lower), 'upper': end(self.upper), 'window': self.window}


class FiniteDomain(DomainSpec):
    """An explicit list of points; neither closedness nor convexity is assumed."""

    kind = 'finite'

    def __init__(self, points):
        self.points = [_as_point(p) for p in points]
        if not self.points:
            raise InvalidParameter("a finite domain needs at least one point")
        if len({p.dim for p in self.points}) > 1:
            raise DimensionMismatch("finite domain points must share one dimension")
        self.is_convex = len(set(self.points)) == 1

    @property
    def dim(self):
        return self.points[0].dim

    def contains(self, x, tol=None):
        self._check_dim(x)
        tol = _default_tol(tol)
        return any(dist(x, p) <= tol for p in self.points)

    def sample(self, count=None, seed=None):
        if seed is None:
            return list(self.points)
        return super().sample(count, seed)

    def grid(self, count):
        return list(self.points[:count])

    def random(self, count, rng):
        return [self.points[i] for i in rng.integers(0, len(self.points), size=count)]

    def as_convex_set(self):
        if self.is_convex:
            return Ball(self.points[0], 0.0)
        return None

    def to_json(self):
        return {'kind': self.kind, 'points': [p.to_json() for p in self.points]}


DOMAIN_KINDS = {
    'box': lambda data: BoxDomain(data['lower'], data['upper']),
    'ball': lambda data: BallDomain(data['center'], data['radius']),
    'interval': lambda data: IntervalDomain(data.get('lower', '-inf'), data.get('upper', 'inf'),
                                            data.get('window', 1.0)),
    'finite': lambda data: FiniteDomain(data['points']),
}


# Mappings

class MappingSpec(ABC):
    """
    A deterministic map of a domain C into R^n.

    ``self_map`` declares C -> C; evaluation then also checks that the image
    stays in the domain.
    """

    family = None

    def __init__(self, domain, self_map=False):
        self.domain = domain
        self.self_map = bool(self_map)

    @abstractmethod
    def _apply(self, coords):
        ...

    @abstractmethod
    def _params_json(self):
        ...

    @property
    def dim(self):
        return self.domain.dim

    def eval(self, x, tol=None):
        if x.dim != self.dim:
            raise DimensionMismatch(f"{self.family} map on {self.domain.describe()} cannot take a {x.dim}-d point")
        if not self.domain.contains(x, tol):
            raise DomainError(self.domain, x)
        image = Point(self._apply(x.coords))
        if self.self_map and not self.domain.contains(image, tol):
            raise DomainError(self.domain, image)
        return image

    def to_json(self):
        return {'family': self.family, **self._params_json(),
                'domain': self.domain.to_json(), 'self_map': self.self_map}

    def describe(self):
        params = ', '.join(f"{key}={value}" for key, value in self._params_json().items())
        return f"{self.family}({params})"

    def __eq__(self, other):
        return isinstance(other, MappingSpec) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    @staticmethod
    def from_json(data, domain=None):
        try:
            family = data['family']
        except (KeyError, TypeError):
            raise InvalidParameter(f"a mapping needs a 'family', got {data!r}")
        if 'domain' in data:
            domain = DomainSpec.from_json(data['domain'])
        if domain is None:
            raise InvalidParameter(f"mapping {family!r} has no domain")
        try:
            factory = MAPPING_FAMILIES[family]
        except KeyError:
            raise InvalidParameter(f"unknown mapping family {family!r}, choose from {sorted(MAPPING_FAMILIES)}")
        try:
            return factory(data, domain, data.get('self_map', False))
        except KeyError as exc:
            raise InvalidParameter(f"mapping {family!r} is missing the field {exc}")
        except TypeError:
            raise InvalidParameter(f"mapping {family!r} has malformed fields: {data!r}")


class Affine(MappingSpec):
    family = 'affine'

    def __init__(self, matrix, offset, domain, self_map=False):
        super().__init__(domain, self_map)
        try:
            self.matrix = np.array(matrix, dtype=np.float64)
        except (TypeError, ValueError):
            raise InvalidParameter(f"affine matrix must be a list of numeric rows, got {matrix!r}")
        self.offset = _as_point(offset)
        if self.matrix.shape != (domain.dim, domain.dim) or self.offset.dim != domain.dim:
            raise DimensionMismatch(f"affine map needs a {domain.dim}x{domain.dim} matrix and a "
                                    f"{domain.dim}-d offset, got {self.matrix.shape} and {self.offset.dim}")
        if not np.all(np.isfinite(self.matrix)):
            raise InvalidParameter("affine matrix must be finite")
        self.matrix.setflags(write=False)

    def _apply(self, coords):
        return self.matrix @ coords + self.offset.coords

    def _params_json(self):
        return {'matrix': self.matrix.tolist(), 'offset': self.offset.to_json()}


class Scale(MappingSpec):
    """``x -> c * x``; ``c = 1`` is the identity."""

    family = 'scale'

    def __init__(self, factor, domain, self_map=False):
        super().__init__(domain, self_map)
        self.factor = finite_scalar(factor, 'scale factor')

    def _apply(self, coords):
        return self.factor * coords

    def _params_json(self):
        return {'factor': self.factor}


class Translation(MappingSpec):
    family = 'translation'

    def __init__(self, offset, domain, self_map=False):
        super().__init__(domain, self_map)
        self.offset = _as_point(offset)
        if self.offset.dim != domain.dim:
            raise DimensionMismatch("translation offset must match the domain dimension")

    def _apply(self, coords):
        return coords + self.offset.coords

    def _params_json(self):
        return {'offset': self.offset.to_json()}


class Rotation2D(MappingSpec):
    family = 'rotation2d'

    def __init__(self, angle, domain, self_map=False):
        super().__init__(domain, self_map)
        if domain.dim != 2:
            raise DimensionMismatch("rotation2d needs a 2-d domain")
        self.angle = finite_scalar(angle, 'rotation angle')
        cos, sin = math.cos(self.angle), math.sin(self.angle)
        self.matrix = np.array([[cos, -sin], [sin, cos]])

    def _apply(self, coords):
        return self.matrix @ coords

    def _params_json(self):
        return {'angle': self.angle}


class Constant(MappingSpec):
    family = 'constant'

    def __init__(self, value, domain, self_map=False):
        super().__init__(domain, self_map)
        self.value = _as_point(value)
        if self.value.dim != domain.dim:
            raise DimensionMismatch("constant value must match the domain dimension")

    def _apply(self, coords):
        return self.value.coords

    def _params_json(self):
        return {'value': self.value.to_json()}


def berinde_residual_weight(a):
    """Smallest L for which :class:`Berinde` with factor ``a`` is quasi-contractive."""
    return max(a / (2.0 * (1.0 - a)), a / (2.0 - a))


class Berinde(MappingSpec):
    """
    Discontinuous quasi-contractive map on [0, 1]::

        T(x) = a * x        for x <= 1/2
        T(x) = a * x / 2    for x >  1/2

    It satisfies |Tx - Ty| <= a|x - y| + L|x - Tx| for every
    L >= max(a / (2(1 - a)), a / (2 - a)), has the fixed point 0, and is not
    nonexpansive because of the jump at 1/2.
    """

    family = 'berinde'
    breakpoint = 0.5

    def __init__(self, a, weight, domain=None, self_map=True):
        domain = IntervalDomain(0.0, 1.0) if domain is None else domain
        super().__init__(domain, self_map)
        self.a = finite_scalar(a, 'berinde factor a')
        self.weight = finite_scalar(weight, 'berinde weight L')
        if not 0.0 < self.a < 1.0:
            raise InvalidParameter(f"berinde factor a must lie in (0,1), got {self.a!r}")
        if self.weight < 0.0:
            raise InvalidParameter(f"berinde weight L must be non-negative, got {self.weight!r}")
        required = berinde_residual_weight(self.a)
        if self.weight < required:
            raise InvalidParameter(f"berinde map with a={self.a!r} needs L >= {required!r}")
        if domain.dim != 1:
            raise DimensionMismatch("the berinde map is one-dimensional")
        for corner in domain.sample(2):
            if not 0.0 <= corner[0] <= 1.0:
                raise InvalidParameter("the berinde map is defined on subsets of [0, 1]")

    def _apply(self, coords):
        slope = self.a if coords[0] <= self.breakpoint else self.a / 2.0
        return slope * coords

    def _params_json(self):
        return {'a': self.a, 'L': self.weight}


class ProjectionComposed(MappingSpec):
    """``x -> P_K(inner(x))`` for a closed convex set ``K``."""

    family = 'projected'

    def __init__(self, inner, convex_set, self_map=False):
        super().__init__(inner.domain, self_map)
        if convex_set.dim != inner.dim:
            raise DimensionMismatch("projection target must match the inner map dimension")
        self.inner = inner
        self.convex_set = convex_set

    def _apply(self, coords):
        return self.convex_set.project(Point(self.inner._apply(coords))).coords

    def _params_json(self):
        inner = self.inner.to_json()
        inner.pop('domain')
        return {'inner': inner, 'set': self.convex_set.to_json()}


MAPPING_FAMILIES = {
    'affine': lambda data, domain, self_map: Affine(data['matrix'], data['offset'], domain, self_map),
    'scale': lambda data, domain, self_map: Scale(data['factor'], domain, self_map),
    'translation': lambda data, domain, self_map: Translation(data['offset'], domain, self_map),
    'rotation2d': lambda data, domain, self_map: Rotation2D(data['angle'], domain, self_map),
    'constant': lambda data, domain, self_map: Constant(data['value'], domain, self_map),
    'berinde': lambda data, domain, self_map: Berinde(data['a'], data['L'], domain, self_map),
    'projected': lambda data, domain, self_map: ProjectionComposed(
        MappingSpec.from_json(data['inner'], domain), ConvexSet.from_json(data['set']), self_map),
}


def identity(domain):
    return Scale(1.0, domain, self_map=True)


# Hybrid parameters and class checks

@dataclass(frozen=True)
class HybridParams:
    """Coefficients of the five-term inequality; ``varsigma``/``eta`` extend it to seven terms."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    varsigma: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        for name in ('alpha', 'beta', 'gamma', 'delta', 'epsilon'):
            object.__setattr__(self, name, finite_scalar(getattr(self, name), name))
        for name in ('varsigma', 'eta'):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, finite_scalar(getattr(self, name), name))

    @classmethod
    def from_json(cls, data):
        try:
            return cls(**{key: data.get(key) for key in ('varsigma', 'eta')},
                       **{key: data[key] for key in ('alpha', 'beta', 'gamma', 'delta', 'epsilon')})
        except KeyError as exc:
            raise InvalidParameter(f"hybrid params are missing {exc}")
        except TypeError:
            raise InvalidParameter(f"hybrid params must be an object, got {data!r}")

    def to_json(self):
        data = {'alpha': self.alpha, 'beta': self.beta, 'gamma': self.gamma,
                'delta': self.delta, 'epsilon': self.epsilon}
        if self.varsigma is not None:
            data['varsigma'] = self.varsigma
        if self.eta is not None:
            data['eta'] = self.eta
        return data


def berinde_embedding_params(a, weight):
    """
    Further-generalized coefficients satisfied by a Berinde (a, L) map.

    From |Tx - Ty|^2 <= (a|x - y| + L|x - Tx|)^2 <= 2a^2|x - y|^2 + 2L^2|x - Tx|^2.
    """
    return HybridParams(1.0, 0.0, 0.0, -2.0 * a * a, -2.0 * weight * weight)


@dataclass(frozen=True)
class ClassCheckReport:
    class_name: str
    pairs_tested: int
    max_violation: float
    witness: Optional[Tuple[Point, Point]]
    tolerance: float
    sampled: bool = True

    @property
    def verdict(self):
        return VIOLATED if self.max_violation > self.tolerance else HOLDS

    @property
    def holds(self):
        return self.verdict == HOLDS

    def to_json(self):
        return {
            'class_name': self.class_name,
            'pairs_tested': self.pairs_tested,
            'max_violation': self.max_violation,
            'witness': None if self.witness is None else [p.to_json() for p in self.witness],
            'tolerance': self.tolerance,
            'sampled': self.sampled,
            'verdict': self.verdict,
        }


@dataclass(frozen=True)
class ConditionVerdict:
    holds: bool
    reason: str

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {'holds': self.holds, 'reason': self.reason}


def pair_grid(points):
    """All ordered pairs, the diagonal included."""
    return [(x, y) for x in points for y in points]


def random_pairs(points, count, seed):
    rng = np.random.default_rng(seed)
    first = rng.integers(0, len(points), size=count)
    second = rng.integers(0, len(points), size=count)
    return [(points[i], points[j]) for i, j in zip(first, second)]


class _PairImages:
    """Row-stacked pair coordinates and images, each distinct point evaluated once."""

    def __init__(self, m, pairs, tol):
        if not pairs:
            raise InvalidParameter("a class check needs at least one pair")
        cache = {}

        def image(point):
            if point not in cache:
                cache[point] = m.eval(point, tol).coords
            return cache[point]

        self.x = np.array([x.coords for x, _ in pairs])
        self.y = np.array([y.coords for _, y in pairs])
        self.tx = np.array([image(x) for x, _ in pairs])
        self.ty = np.array([image(y) for _, y in pairs])

    def scale(self):
        """Largest squared norm among the pair coordinates and their images."""
        return max(float(np.max(_sq(a))) for a in (self.x, self.y, self.tx, self.ty))


def _sq(rows):
    return np.einsum('ij,ij->i', rows, rows)


def _norm(rows):
    return np.sqrt(_sq(rows))


def _report(class_name, values, pairs, tolerance):
    worst = int(np.argmax(values))
    max_violation = max(float(values[worst]), 0.0)
    witness = tuple(pairs[worst]) if max_violation > 0.0 else None
    report = ClassCheckReport(class_name, len(pairs), max_violation, witness, tolerance)
    logger.debug("%s check over %d pairs: %s (max violation %.3e)",
                 class_name, len(pairs), report.verdict, max_violation)
    return report


def _further_lhs(p, images):
    x, y, tx, ty = images.x, images.y, images.tx, images.ty
    return (p.alpha * _sq(tx - ty) + p.beta * _sq(x - ty) + p.gamma * _sq(tx - y)
            + p.delta * _sq(x - y) + p.epsilon * _sq(x - tx))


def check_further_hybrid(m, p, pairs, tol=None):
    """
    Sampled check of

        a|Tx-Ty|^2 + b|x-Ty|^2 + c|Tx-y|^2 + d|x-y|^2 + e|x-Tx|^2 <= 0.
    """
    tolerance = Tolerance.default(tol)
    images = _PairImages(m, pairs, tolerance.atol)
    return _report('sgm', _further_lhs(p, images), pairs, tolerance.bound(images.scale()))


def check_normally_hybrid(m, p, pairs, tol=None):
    tolerance = Tolerance.default(tol)
    images = _PairImages(m, pairs, tolerance.atol)
    return _report('ngm', _further_lhs(replace(p, epsilon=0.0), images), pairs, tolerance.bound(images.scale()))


def check_widely_more_hybrid(m, p, pairs, tol=None):
    if p.varsigma is None or p.eta is None:
        raise InvalidParameter("the widely more generalized check needs varsigma and eta")
    tolerance = Tolerance.default(tol)
    images = _PairImages(m, pairs, tolerance.atol)
    x, y, tx, ty = images.x, images.y, images.tx, images.ty
    values = (_further_lhs(p, images) + p.varsigma * _sq(y - ty)
              + p.eta * _sq((x - tx) - (y - ty)))
    return _report('wmgm', values, pairs, tolerance.bound(images.scale()))


def check_nonexpansive(m, pairs, tol=None):
    tolerance = Tolerance.default(tol)
    images = _PairImages(m, pairs, tolerance.atol)
    values = _norm(images.tx - images.ty) - _norm(images.x - images.y)
    return _report('nonexpansive', values, pairs, tolerance.bound(math.sqrt(images.scale())))


def check_berinde_quasi_contractive(m, a, weight, pairs, tol=None):
    """Sampled check of |Tx - Ty| <= a|x - y| + L|x - Tx|."""
    tolerance = Tolerance.default(tol)
    images = _PairImages(m, pairs, tolerance.atol)
    values = (_norm(images.tx - images.ty) - a * _norm(images.x - images.y)
              - weight * _norm(images.x - images.tx))
    return _report('berinde-quasi-contractive', values, pairs, tolerance.bound(math.sqrt(images.scale())))


def check_quasi_nonexpansive(m, fixed_points, sample, tol=None):
    """
    Sampled check of |Tx - z| <= |x - z| for every listed fixed point z.

    A listed point that is not fixed is a broken setup and raises
    :class:`FixedPointError` instead of producing a report.
    """
    tol = _default_tol(tol)
    if not fixed_points or not sample:
        raise InvalidParameter("quasi-nonexpansive check needs fixed points and a sample")
    for z in fixed_points:
        residual = dist(m.eval(z, tol), z)
        if residual > tol:
            raise FixedPointError(f"{z.to_json()} is not a fixed point of {m.describe()}", z, None, residual)
    pairs = [(x, z) for z in fixed_points for x in sample]
    values = np.array([dist(m.eval(x, tol), z) - dist(x, z) for x, z in pairs])
    scale = max(dist(x, z) for x, z in pairs)
    return _report('quasi-nonexpansive', values, pairs, Tolerance.default(tol).bound(scale))


def check_theorem_conditions(p):
    """alpha+beta+gamma+delta >= 0, epsilon >= 0, and alpha+beta > 0 or alpha+gamma > 0."""
    if p.alpha + p.beta + p.gamma + p.delta < 0.0:
        return ConditionVerdict(False, "α+β+γ+δ ≥ 0 fails")
    if p.epsilon < 0.0:
        return ConditionVerdict(False, "ε ≥ 0 fails")
    if not (p.alpha + p.beta > 0.0 or p.alpha + p.gamma > 0.0):
        return ConditionVerdict(False, "neither α+β>0 nor α+γ>0")
    return ConditionVerdict(True, "all conditions hold")
