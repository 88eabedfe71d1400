"""
Scenario value types.

A scenario fixes a domain, the pair S, T, the hybrid coefficients and every
knob of one reproducible experiment. Validation lives in :mod:`cap.forms`.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .exceptions import ScenarioError
from .geometry import Point
from .mappings import DomainSpec, HybridParams, MappingSpec, pair_grid, random_pairs
from .projection import ConvexSet
from .schemes import Race, SchemeKind, StepSequence, StopRule

logger = logging.getLogger(__name__)

CLASS_CHECKS = ('sgm', 'ngm', 'wmgm', 'nonexpansive', 'berinde-quasi-contractive', 'quasi-nonexpansive')


@dataclass(frozen=True)
class Sampling:
    """Domain sample size; ``random_domain`` draws the sample with the scenario seed, ``pairs`` draws random pairs."""

    count: int = 41
    random_domain: bool = False
    pairs: Optional[int] = None

    def to_json(self):
        return {'count': self.count, 'random_domain': self.random_domain, 'pairs': self.pairs}


@dataclass(frozen=True)
class SchemePlan:
    kinds: Tuple[SchemeKind, ...]
    steps: StepSequence
    x0: Point
    stop: StopRule

    def to_json(self):
        beta = next((kind.beta for kind in self.kinds if kind.beta is not None), None)
        data = {'kinds': [kind.name for kind in self.kinds], 'steps': self.steps.to_json(),
                'x0': self.x0.to_json(), 'stop': self.stop.to_json()}
        if beta is not None:
            data['beta'] = beta.to_json()
        return data


@dataclass(frozen=True)
class Candidates:
    domain: DomainSpec
    count: int

    def grid(self):
        return self.domain.sample(self.count)

    def to_json(self):
        return {'domain': self.domain.to_json(), 'count': self.count}


@dataclass(frozen=True)
class OrbitPlan:
    start: Point
    horizon: Optional[int] = None
    bound: Optional[float] = None

    def to_json(self):
        return {'start': self.start.to_json(), 'horizon': self.horizon, 'bound': self.bound}


@dataclass(frozen=True)
class Diagnostics:
    window: int = 10
    residual_tol: float = 1e-8
    fejer_tol: float = 1e-12
    energy_tol: float = 1e-9
    projection_tol: float = 1e-8
    limit_tol: float = 1e-6
    convexity_trials: int = 1000
    convexity_tol: float = 1e-8

    def to_json(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class Scenario:
    name: str
    domain: DomainSpec
    s: MappingSpec
    t: MappingSpec
    params: HybridParams
    seed: int
    tol: float
    description: str = ''
    checks: Tuple[str, ...] = ()
    certificate: Optional[Tuple[float, float]] = None
    fixed_points: Tuple[Point, ...] = ()
    sampling: Sampling = field(default_factory=Sampling)
    schemes: Optional[SchemePlan] = None
    z_ref: Optional[Point] = None
    cap_set: Optional[ConvexSet] = None
    candidates: Optional[Candidates] = None
    orbit: Optional[OrbitPlan] = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    expected: Dict[str, bool] = field(default_factory=dict)

    def domain_sample(self):
        return self.domain.sample(self.sampling.count, self.seed if self.sampling.random_domain else None)

    def pairs(self, sample):
        if self.sampling.pairs is None:
            return pair_grid(sample)
        return random_pairs(sample, self.sampling.pairs, self.seed)

    def race(self):
        plan = self.schemes
        return Race(self.name, self.s, self.t, plan.x0, plan.steps, plan.kinds,
                    plan.stop.max_iters, self.z_ref, plan.stop.divergence_bound)

    def to_json(self):
        probes = {}
        if self.z_ref is not None:
            probes['z_ref'] = self.z_ref.to_json()
        if self.cap_set is not None:
            probes['cap_set'] = self.cap_set.to_json()
        if self.candidates is not None:
            probes['candidates'] = self.candidates.to_json()
        data = {
            'name': self.name,
            'description': self.description,
            'domain': self.domain.to_json(),
            'mappings': {'S': self.s.to_json(), 'T': self.t.to_json()},
            'params': self.params.to_json(),
            'checks': list(self.checks),
            'fixed_points': [z.to_json() for z in self.fixed_points],
            'sampling': self.sampling.to_json(),
            'seed': self.seed,
            'tol': self.tol,
            'probes': probes,
            'diagnostics': self.diagnostics.to_json(),
            'expected': dict(sorted(self.expected.items())),
        }
        if self.certificate is not None:
            data['certificate'] = {'a': self.certificate[0], 'L': self.certificate[1]}
        if self.schemes is not None:
            data['schemes'] = self.schemes.to_json()
        if self.orbit is not None:
            data['orbit'] = self.orbit.to_json()
        return data


def scenario_from_json(data, path='<scenario>'):
    """Validate a decoded scenario document; every problem is collected into one :class:`ScenarioError`."""
    from .forms import ScenarioForm

    if not isinstance(data, dict):
        raise ScenarioError(path, {'__all__': [f"a scenario is a JSON object, got {type(data).__name__}"]})
    unknown = sorted(set(data) - set(ScenarioForm.base_fields))
    if unknown:
        raise ScenarioError(path, {'__all__': [f"unknown field(s): {', '.join(unknown)}"]})
    form = ScenarioForm(data)
    if not form.is_valid():
        raise ScenarioError(path, {name: [str(message) for message in messages]
                                   for name, messages in form.errors.items()})
    return form.build()


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ScenarioError(path, {'__all__': [f"cannot read file: {exc.strerror or exc}"]})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(path, {'json': [f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]})
    scenario = scenario_from_json(data, path)
    logger.debug("loaded scenario %s from %s", scenario.name, path)
    return scenario


def with_overrides(scenario, seed=None, tol=None):
    """Apply the command-line ``--seed``/``--tol`` overrides."""
    changes = {}
    if seed is not None:
        if seed < 0:
            raise ScenarioError('--seed', {'seed': ["seed must be non-negative"]})
        changes['seed'] = seed
    if tol is not None:
        if not tol > 0.0:
            raise ScenarioError('--tol', {'tol': ["tolerance must be positive"]})
        changes['tol'] = tol
    return replace(scenario, **changes) if changes else scenario
