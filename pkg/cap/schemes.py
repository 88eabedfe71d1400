"""
Iteration schemes and their convergence diagnostics.

Recurrences, for a step sequence alpha_n in (0, 1):

    picard                x_{n+1} = T x_n
    mann                  x_{n+1} = (1 - a_n) x_n + a_n T x_n
    ishikawa              y_n = (1 - b_n) x_n + b_n T x_n,  x_{n+1} = (1 - a_n) x_n + a_n T y_n
    picard_mann           y_n = (1 - a_n) x_n + a_n T x_n,  x_{n+1} = T y_n
    two_map_picard_mann   y_n = (1 - a_n) x_n + a_n T x_n,  x_{n+1} = S y_n

In R^n weak and strong convergence coincide, so convergence of the iterates is
observed directly as a vanishing residual |T x_n - x_n|.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

from django.conf import settings

from .exceptions import DomainError, InvalidParameter, SchemeError, StepSequenceError
from .geometry import Point, dist, finite_scalar, mann_combination, norm

logger = logging.getLogger(__name__)

PICARD = 'picard'
MANN = 'mann'
ISHIKAWA = 'ishikawa'
PICARD_MANN = 'picard_mann'
TWO_MAP_PICARD_MANN = 'two_map_picard_mann'

SCHEMES = (PICARD, MANN, ISHIKAWA, PICARD_MANN, TWO_MAP_PICARD_MANN)

# schemes whose step satisfies |x_{n+1} - z|^2 <= |x_n - z|^2 - a_n(1 - a_n)|T x_n - x_n|^2
MANN_TYPE = (MANN, PICARD_MANN, TWO_MAP_PICARD_MANN)

TOLERANCE_MET = 'tolerance-met'
MAX_ITERS = 'max-iters'
DIVERGED = 'diverged'


# Step sequences

def _product_floor(lo, hi):
    """min of t(1 - t) over [lo, hi]; the product is concave so an endpoint wins."""
    return min(lo * (1.0 - lo), hi * (1.0 - hi))


def _open_unit(value, name):
    value = finite_scalar(value, name)
    if not 0.0 < value < 1.0:
        raise StepSequenceError(f"step outside (0,1): {name} = {value!r}")
    return value


@dataclass(frozen=True)
class StepSequence:
    """
    alpha_n for n >= 1, with a certified ``lower_bound`` L > 0 such that
    alpha_n (1 - alpha_n) >= L for every n.
    """

    kind: str
    params: tuple
    lower_bound: float

    def __call__(self, n):
        p = dict(self.params)
        if self.kind == 'constant':
            return p['value']
        if self.kind == 'periodic':
            return p['odd'] if n % 2 == 1 else p['even']
        value = p['limit'] + (p['start'] - p['limit']) / n
        floor = p['floor']
        if floor > 0.0:
            value = min(max(value, floor), 1.0 - floor)
        return value

    def to_json(self):
        return {'kind': self.kind, **dict(self.params)}

    @classmethod
    def from_json(cls, data):
        try:
            params = dict(data)
            kind = params.pop('kind')
        except (KeyError, TypeError, ValueError):
            raise StepSequenceError(f"a step sequence needs a 'kind', got {data!r}")
        return make_step_sequence(kind, params)


def make_step_sequence(kind, params):
    """
    Build a step sequence and certify liminf alpha_n(1 - alpha_n) > 0.

    Kinds: ``constant`` (value), ``periodic`` (odd, even) and ``harmonic``
    (alpha_n = limit + (start - limit)/n, optionally clipped into
    [floor, 1 - floor]).
    """
    try:
        if kind == 'constant':
            value = _open_unit(params['value'], 'value')
            return StepSequence(kind, (('value', value),), value * (1.0 - value))
        if kind == 'periodic':
            odd, even = _open_unit(params['odd'], 'odd'), _open_unit(params['even'], 'even')
            return StepSequence(kind, (('even', even), ('odd', odd)), _product_floor(odd, even))
        if kind == 'harmonic':
            limit = finite_scalar(params['limit'], 'limit')
            start = finite_scalar(params['start'], 'start')
            floor = finite_scalar(params.get('floor', 0.0), 'floor')
            if not 0.0 <= floor < 0.5:
                raise StepSequenceError(f"floor must lie in [0, 0.5), got {floor!r}")
            if floor == 0.0:
                _open_unit(start, 'start')
                if not 0.0 < limit < 1.0:
                    raise StepSequenceError(
                        f"liminf α_n(1−α_n) = {limit * (1.0 - limit)!r}: steps drift to {limit!r} without clipping")
                lo, hi = min(limit, start), max(limit, start)
            else:
                lo = min(max(min(limit, start), floor), 1.0 - floor)
                hi = min(max(max(limit, start), floor), 1.0 - floor)
            params = (('floor', floor), ('limit', limit), ('start', start))
            return StepSequence(kind, params, _product_floor(lo, hi))
    except KeyError as exc:
        raise StepSequenceError(f"step sequence {kind!r} is missing {exc}")
    raise StepSequenceError(f"unknown step sequence kind {kind!r}")


# Runs

@dataclass(frozen=True)
class SchemeKind:
    name: str
    beta: Optional[StepSequence] = None

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise InvalidParameter(f"unknown scheme {self.name!r}, choose from {', '.join(SCHEMES)}")
        if (self.name == ISHIKAWA) != (self.beta is not None):
            raise InvalidParameter("ishikawa, and only ishikawa, carries a secondary step sequence")


@dataclass(frozen=True)
class StopRule:
    tol: float = 1e-8
    max_iters: Optional[int] = None
    divergence_bound: Optional[float] = None

    def resolved(self, x0):
        max_iters = settings.CAP_MAX_ITERS if self.max_iters is None else int(self.max_iters)
        bound = self.divergence_bound
        if bound is None:
            bound = settings.CAP_DIVERGENCE_FACTOR * (1.0 + norm(x0))
        if max_iters < 1:
            raise InvalidParameter("max_iters must be at least 1")
        return max_iters, bound

    def to_json(self):
        return {'tol': self.tol, 'max_iters': self.max_iters, 'divergence_bound': self.divergence_bound}


@dataclass(frozen=True)
class Probes:
    """Analysis-only quantities; they never enter the recurrence."""

    z_ref: Optional[Point] = None
    cap_set: Optional[object] = None


@dataclass
class ConvergenceTrace:
    scheme: str
    iterates: List[Point] = field(default_factory=list)
    auxiliary: List[Point] = field(default_factory=list)
    alphas: List[float] = field(default_factory=list)
    residuals_t: List[float] = field(default_factory=list)
    residuals_s: Optional[List[float]] = None
    distances: Optional[List[float]] = None
    projections: Optional[List[Point]] = None
    stop_reason: Optional[str] = None

    @property
    def iterations(self):
        return len(self.iterates) - 1

    @property
    def final(self):
        return self.iterates[-1]

    def residual(self, n):
        """max(|T x_n - x_n|, |S x_n - x_n|) for the 0-based iterate index ``n``."""
        value = self.residuals_t[n]
        if self.residuals_s is not None:
            value = max(value, self.residuals_s[n])
        return value

    def to_json(self):
        return {
            'scheme': self.scheme,
            'stop_reason': self.stop_reason,
            'iterates': [x.to_json() for x in self.iterates],
            'auxiliary': [y.to_json() for y in self.auxiliary],
            'alphas': self.alphas,
            'residuals_T': self.residuals_t,
            'residuals_S': self.residuals_s,
            'distances': self.distances,
            'projections': None if self.projections is None else [p.to_json() for p in self.projections],
        }


def _evaluate(m, x, step, what):
    try:
        return m.eval(x)
    except DomainError as exc:
        raise SchemeError(f"{what} left the domain: {exc}", step) from exc


def run_scheme(kind, s, t, x0, steps, stop, probes=None):
    """
    Run one scheme from ``x0`` and record its trace.

    ``s`` is used by ``two_map_picard_mann`` only; there it is also part of the
    stopping rule, which asks every used map to have a residual <= ``stop.tol``.
    Divergence is a stop reason, leaving the domain is a :class:`SchemeError`.
    """
    probes = probes or Probes()
    two_map = kind.name == TWO_MAP_PICARD_MANN
    if two_map:
        if s is None:
            raise InvalidParameter("two_map_picard_mann needs a second mapping S")
        if s.domain != t.domain:
            raise InvalidParameter("domain mismatch between S and T")
    max_iters, bound = stop.resolved(x0)
    trace = ConvergenceTrace(
        scheme=kind.name,
        residuals_s=[] if two_map else None,
        distances=[] if probes.z_ref is not None else None,
        projections=[] if probes.cap_set is not None else None,
    )

    def record(x):
        trace.iterates.append(x)
        if trace.distances is not None:
            trace.distances.append(dist(x, probes.z_ref))
        if trace.projections is not None:
            trace.projections.append(probes.cap_set.project(x))

    record(x0)
    while True:
        n = len(trace.iterates)
        x = trace.final
        tx = _evaluate(t, x, n, 'x_n')
        trace.residuals_t.append(dist(tx, x))
        if two_map:
            trace.residuals_s.append(dist(_evaluate(s, x, n, 'x_n'), x))
        if trace.residual(n - 1) <= stop.tol:
            trace.stop_reason = TOLERANCE_MET
            break
        if n > max_iters:
            trace.stop_reason = MAX_ITERS
            break
        alpha = steps(n)
        trace.alphas.append(alpha)
        if kind.name == PICARD:
            following = tx
        elif kind.name == MANN:
            following = mann_combination(x, tx, alpha)
        elif kind.name == ISHIKAWA:
            y = mann_combination(x, tx, kind.beta(n))
            trace.auxiliary.append(y)
            following = mann_combination(x, _evaluate(t, y, n, 'y_n'), alpha)
        else:
            y = mann_combination(x, tx, alpha)
            trace.auxiliary.append(y)
            following = _evaluate(s if two_map else t, y, n, 'y_n')
        record(following)
        if norm(following) > bound:
            trace.stop_reason = DIVERGED
            break
    logger.debug("%s stopped after %d iterations: %s", kind.name, trace.iterations, trace.stop_reason)
    return trace


# Diagnostics

@dataclass(frozen=True)
class StepCheck:
    holds: bool
    first_violation: Optional[int] = None

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {'holds': self.holds, 'first_violation': self.first_violation}


def fejer_check(trace, z, tol=0.0):
    """
    |x_{n+1} - z| <= |x_n - z| + tol for all consecutive iterates.

    Only meaningful for a (common) attractive point z, which the caller
    certifies. ``first_violation`` is the 1-based index n of the failing x_n.
    """
    distances = [dist(x, z) for x in trace.iterates]
    for n in range(len(distances) - 1):
        if distances[n + 1] > distances[n] + tol:
            return StepCheck(False, n + 1)
    return StepCheck(True)


def energy_check(trace, z, tol=1e-9):
    """|x_{n+1} - z|^2 <= |x_n - z|^2 - a_n(1 - a_n)|T x_n - x_n|^2 + tol, per step."""
    if trace.scheme not in MANN_TYPE:
        raise InvalidParameter(f"the one-step energy inequality is not defined for {trace.scheme}")
    for n, alpha in enumerate(trace.alphas):
        before = dist(trace.iterates[n], z) ** 2
        after = dist(trace.iterates[n + 1], z) ** 2
        if after > before - alpha * (1.0 - alpha) * trace.residuals_t[n] ** 2 + tol:
            return StepCheck(False, n + 1)
    return StepCheck(True)


def boundedness_check(trace, z, tol=1e-9):
    """max_n |x_n| <= |x_1 - z| + |z| + tol."""
    limit = dist(trace.iterates[0], z) + norm(z) + tol
    return max(norm(x) for x in trace.iterates) <= limit


def residual_limit_check(trace, tol, window=10):
    """
    True when the residuals of the final ``window`` iterates are all <= ``tol``.

    A trace shorter than the window is judged on all of its iterates, unless it
    stopped on the tolerance: then the stopping iterate is the limit and alone
    decides.
    """
    count = len(trace.residuals_t)
    if count == 0:
        return False
    if count < window and trace.stop_reason == TOLERANCE_MET:
        return trace.residual(count - 1) <= tol
    tail = range(max(count - window, 0), count)
    return max(trace.residual(n) for n in tail) <= tol


@dataclass(frozen=True)
class ProjectionSequenceResult:
    holds: bool
    limit: Point
    max_step: float
    limit_gap: float
    converged: bool

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {'holds': self.holds, 'limit': self.limit.to_json(), 'max_step': self.max_step,
                'limit_gap': self.limit_gap, 'converged': self.converged}


def projection_steps(trace):
    """dist(P x_n, P x_{n+1}) for consecutive projected iterates."""
    if trace.projections is None:
        raise InvalidParameter("the trace carries no projections; run it with a cap_set projection")
    return [dist(a, b) for a, b in zip(trace.projections, trace.projections[1:])]


def projection_sequence_check(trace, tol, window=10, limit_tol=1e-6):
    """
    P x_n must be Cauchy-small over the final window; its last term is the limit
    estimate. When the run met its tolerance the limit must also be within
    ``limit_tol`` of the final iterate (q = lim P x_n).
    """
    deltas = projection_steps(trace)
    max_step = max(deltas[-window:], default=0.0)
    limit = trace.projections[-1]
    limit_gap = dist(limit, trace.final)
    converged = trace.stop_reason == TOLERANCE_MET
    holds = max_step <= tol and (not converged or limit_gap <= limit_tol)
    return ProjectionSequenceResult(holds, limit, max_step, limit_gap, converged)


def iterations_to_tolerance(trace, tol):
    """Index of the first iterate whose residual is <= ``tol``, or None."""
    for n in range(len(trace.residuals_t)):
        if trace.residual(n) <= tol:
            return n
    return None


# Scheme races

@dataclass(frozen=True)
class Race:
    name: str
    s: object
    t: object
    x0: Point
    steps: StepSequence
    kinds: tuple
    max_iters: Optional[int] = None
    z_ref: Optional[Point] = None
    divergence_bound: Optional[float] = None


@dataclass(frozen=True)
class ComparisonRow:
    scenario: str
    scheme: str
    iterations: Optional[int]
    final_residual: float
    final_distance: Optional[float]

    def to_csv(self):
        return [self.scenario, self.scheme,
                'inf' if self.iterations is None else str(self.iterations),
                repr(self.final_residual),
                '' if self.final_distance is None else repr(self.final_distance)]

    def to_json(self):
        return {'scenario': self.scenario, 'scheme': self.scheme, 'iterations': self.iterations,
                'final_residual': self.final_residual, 'final_distance': self.final_distance}


COMPARISON_HEADER = ['scenario', 'scheme', 'iterations_to_tol', 'final_residual', 'final_distance']


def compare_schemes(races, tol):
    """Run every requested scheme of every race to ``tol``; rows keep race then scheme order."""
    rows = []
    for race in races:
        for kind in race.kinds:
            stop = StopRule(tol=tol, max_iters=race.max_iters, divergence_bound=race.divergence_bound)
            trace = run_scheme(kind, race.s, race.t, race.x0, race.steps, stop, Probes(z_ref=race.z_ref))
            distance = None if race.z_ref is None else dist(trace.final, race.z_ref)
            last = len(trace.residuals_t) - 1
            rows.append(ComparisonRow(race.name, kind.name, iterations_to_tolerance(trace, tol),
                                      trace.residual(last) if last >= 0 else math.nan, distance))
    return rows
