"""
Attractive and common attractive points.

A point z is attractive for T on C when |Tx - z| <= |x - z| for every x in C,
and a common attractive point of S and T when it is attractive for both. The
quantifier ranges over all of C; here it ranges over a finite domain sample,
and every result records the sample size it was decided on.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from django.conf import settings

from .exceptions import DomainError, FixedPointError, InvalidParameter, SchemeError
from .geometry import Point, dist, mann_combination, norm
from .mappings import check_quasi_nonexpansive

logger = logging.getLogger(__name__)


def _default_tol(tol):
    return settings.CAP_ATOL if tol is None else float(tol)


@dataclass(frozen=True)
class Membership:
    holds: bool
    witness: Point
    max_violation: float
    sample_size: int
    tol: float

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {'holds': self.holds, 'witness': self.witness.to_json(), 'max_violation': self.max_violation,
                'sample_size': self.sample_size, 'tol': self.tol}


class _AttractionSample:
    """A domain sample with the images of one or two maps evaluated once."""

    def __init__(self, mappings, domain_sample, tol):
        if not domain_sample:
            raise InvalidParameter("attractiveness is decided on a non-empty domain sample")
        self.points = list(domain_sample)
        self.x = np.array([x.coords for x in self.points])
        self.images = [np.array([m.eval(x, tol).coords for x in self.points]) for m in mappings]

    def violations(self, z):
        if z.dim != self.x.shape[1]:
            raise InvalidParameter(f"candidate {z.to_json()} does not match the domain dimension")
        reach = np.max([np.linalg.norm(image - z.coords, axis=1) for image in self.images], axis=0)
        return reach - np.linalg.norm(self.x - z.coords, axis=1)

    def membership(self, z, tol):
        values = self.violations(z)
        worst = int(np.argmax(values))
        return Membership(holds=bool(np.all(values <= tol)), witness=self.points[worst],
                          max_violation=float(values[worst]), sample_size=len(self.points), tol=tol)


def _require_shared_domain(s, t):
    if s.domain != t.domain:
        raise InvalidParameter(f"domain mismatch: {s.domain.describe()} vs {t.domain.describe()}")


def is_attractive_point(m, z, domain_sample, tol=None):
    """Decide |Tx - z| <= |x - z| + tol on the sample; the witness maximizes the violation."""
    tol = _default_tol(tol)
    return _AttractionSample([m], domain_sample, tol).membership(z, tol)


def is_common_attractive(s, t, z, domain_sample, tol=None):
    tol = _default_tol(tol)
    _require_shared_domain(s, t)
    return _AttractionSample([s, t], domain_sample, tol).membership(z, tol)


def common_attraction_predicate(s, t, domain_sample):
    """``pred(z, tol)`` deciding common attractiveness, with the images on the sample evaluated once."""
    _require_shared_domain(s, t)
    sample = _AttractionSample([s, t], domain_sample, settings.CAP_ATOL)

    def pred(z, tol=None):
        return sample.membership(z, _default_tol(tol)).holds
    return pred


@dataclass(frozen=True)
class CapEstimate:
    members: List[Point]
    candidates_tested: int
    domain_sample_size: int
    tol: float

    def recheck(self, s, t, domain_sample):
        """True when every stored member still passes on ``domain_sample``."""
        return all(is_common_attractive(s, t, z, domain_sample, self.tol).holds for z in self.members)

    def to_json(self):
        return {'members': [z.to_json() for z in self.members], 'candidates_tested': self.candidates_tested,
                'domain_sample_size': self.domain_sample_size, 'tol': self.tol}


def estimate_cap_region(s, t, domain_sample, candidate_grid, tol=None):
    """Members of ``candidate_grid`` that are common attractive points on the sample, in grid order."""
    tol = _default_tol(tol)
    _require_shared_domain(s, t)
    if not candidate_grid:
        raise InvalidParameter("CAP estimation needs a non-empty candidate grid")
    sample = _AttractionSample([s, t], domain_sample, tol)
    members = [z for z in candidate_grid if sample.membership(z, tol).holds]
    logger.debug("CAP estimate: %d of %d candidates on a sample of %d",
                 len(members), len(candidate_grid), len(sample.points))
    return CapEstimate(members, len(candidate_grid), len(sample.points), tol)


@dataclass
class ConvexityReport:
    trials: int
    failures: list = field(default_factory=list)
    limits_checked: int = 0
    closure_failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures and not self.closure_failures

    def to_json(self):
        return {'trials': self.trials, 'failures': self.failures, 'limits_checked': self.limits_checked,
                'closure_failures': self.closure_failures, 'passed': self.passed}


def _combination(rng, members):
    i, j = rng.integers(0, len(members), size=2)
    u, v = members[i], members[j]
    lam = float(rng.uniform(1e-12, 1.0 - 1e-12))
    return u, v, lam, mann_combination(v, u, lam)


def check_convexity_of_membership(pred, members, trials=1000, seed=0, tol=None, sequence_length=20):
    """
    Sampled convexity and closedness of the set described by ``pred(point, tol)``.

    Convexity: c = lambda*u + (1-lambda)*v must pass for random member pairs.
    Closedness: for another seeded stream of pairs, c + (u-c)/k (k = 1..sequence_length)
    tends to c; whenever every term passes, the limit c must pass too.
    Failures are report entries, not errors.
    """
    tol = _default_tol(tol)
    members = list(members)
    if len(members) < 2:
        return ConvexityReport(trials=0)
    report = ConvexityReport(trials=trials)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u, v, lam, combined = _combination(rng, members)
        if not pred(combined, tol):
            report.failures.append({'u': u.to_json(), 'v': v.to_json(), 'lambda': lam, 'point': combined.to_json()})
    rng = np.random.default_rng([seed, 1])
    for _ in range(trials):
        u, v, lam, limit = _combination(rng, members)
        if not all(pred(limit + (u - limit) / k, tol) for k in range(1, sequence_length + 1)):
            continue
        report.limits_checked += 1
        if not pred(limit, tol):
            report.closure_failures.append({'u': u.to_json(), 'v': v.to_json(), 'lambda': lam,
                                            'point': limit.to_json()})
    return report


def cap_fixed_point_bridge(s, t, z, c, tol=None):
    """
    Project a common attractive point onto the closed convex domain ``c``.

    The projection must be a common fixed point of S and T; anything else means
    the instance is set up wrongly and raises :class:`FixedPointError`.
    """
    tol = _default_tol(tol)
    u = c.project(z)
    residual_s = dist(s.eval(u, tol), u)
    residual_t = dist(t.eval(u, tol), u)
    if residual_s > tol or residual_t > tol:
        raise FixedPointError(f"projection {u.to_json()} of {z.to_json()} is not a common fixed point",
                              u, residual_s, residual_t)
    return u


@dataclass
class EquivalenceReport:
    cap_members: List[Point]
    fixed_points: List[Point]
    not_fixed: list = field(default_factory=list)
    not_attractive: list = field(default_factory=list)
    quasi_nonexpansive: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.not_fixed and not self.not_attractive

    def to_json(self):
        return {
            'cap_members': [z.to_json() for z in self.cap_members],
            'fixed_points': [z.to_json() for z in self.fixed_points],
            'not_fixed': self.not_fixed,
            'not_attractive': self.not_attractive,
            'quasi_nonexpansive': {name: report.to_json() for name, report in self.quasi_nonexpansive.items()},
            'passed': self.passed,
        }


def check_cap_fixedpoint_equivalence(s, t, c_sample, fixed_points, tol=None):
    """
    Both sampled inclusions of CAP(S,T) ∩ C = F(S) ∩ F(T) for quasi-nonexpansive S and T.

    (i) every sampled point of C that is a common attractive point is fixed by S and T;
    (ii) every listed common fixed point is a common attractive point.
    """
    tol = _default_tol(tol)
    report = EquivalenceReport(cap_members=estimate_cap_region(s, t, c_sample, c_sample, tol).members,
                               fixed_points=list(fixed_points))
    for name, m in (('S', s), ('T', t)):
        report.quasi_nonexpansive[name] = check_quasi_nonexpansive(m, report.fixed_points, c_sample, tol)
    for z in report.cap_members:
        residual_s, residual_t = dist(s.eval(z, tol), z), dist(t.eval(z, tol), z)
        if residual_s > tol or residual_t > tol:
            report.not_fixed.append({'point': z.to_json(), 'residual_s': residual_s, 'residual_t': residual_t})
    for z in report.fixed_points:
        membership = is_common_attractive(s, t, z, c_sample, tol)
        if not membership:
            report.not_attractive.append({'point': z.to_json(), 'witness': membership.witness.to_json(),
                                          'max_violation': membership.max_violation})
    return report


BOUNDED = 'bounded-at-horizon'
EXCEEDED = 'exceeded'


@dataclass(frozen=True)
class OrbitReport:
    """Finite-horizon evidence about the boundedness of the orbits of S and T."""

    start: Point
    horizon: int
    bound: float
    max_norm_s: float
    max_norm_t: float
    exceeded_step: Optional[int] = None
    exceeded_norm: Optional[float] = None
    exceeded_by: Optional[str] = None

    @property
    def verdict(self):
        return BOUNDED if self.exceeded_step is None else EXCEEDED

    def to_json(self):
        return {
            'start': self.start.to_json(), 'horizon': self.horizon, 'bound': self.bound,
            'max_norm_S': self.max_norm_s, 'max_norm_T': self.max_norm_t, 'verdict': self.verdict,
            'exceeded_step': self.exceeded_step, 'exceeded_norm': self.exceeded_norm,
            'exceeded_by': self.exceeded_by,
            'note': 'finite-horizon heuristic for an asymptotic property',
        }


def orbit_bounded(s, t, z, horizon=None, bound=None):
    """
    Track S^n z and T^n z separately for n = 0..horizon; both must stay within ``bound``.

    Defaults: ``CAP_ORBIT_HORIZON`` steps and ``CAP_ORBIT_BOUND_FACTOR * (1 + |z|)``.
    """
    horizon = settings.CAP_ORBIT_HORIZON if horizon is None else int(horizon)
    bound = settings.CAP_ORBIT_BOUND_FACTOR * (1.0 + norm(z)) if bound is None else float(bound)
    if horizon < 1 or bound <= 0.0:
        raise InvalidParameter("orbit check needs horizon >= 1 and bound > 0")
    orbit_s, orbit_t = z, z
    max_s = max_t = norm(z)
    if max_s > bound:
        return OrbitReport(z, horizon, bound, max_s, max_t, 0, max_s, 'start')
    for step in range(1, horizon + 1):
        try:
            orbit_s, orbit_t = s.eval(orbit_s), t.eval(orbit_t)
        except DomainError as exc:
            raise SchemeError(f"orbit left the domain: {exc}", step) from exc
        norm_s, norm_t = norm(orbit_s), norm(orbit_t)
        max_s, max_t = max(max_s, norm_s), max(max_t, norm_t)
        if norm_s > bound or norm_t > bound:
            offender, offending = ('S', norm_s) if norm_s > bound else ('T', norm_t)
            return OrbitReport(z, horizon, bound, max_s, max_t, step, offending, offender)
    return OrbitReport(z, horizon, bound, max_s, max_t)
