"""
Scenario orchestration and machine-readable output.

``run_scenario`` executes the phases of one scenario in a fixed order and
records every observation as a named boolean; verdicts compare those
observations with the scenario's ``expected`` map and nothing else, so they
can be re-derived from ``summary.json`` alone.
"""
import csv
import json
import logging
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional

from django.conf import settings

from .attractive import (BOUNDED, cap_fixed_point_bridge, check_cap_fixedpoint_equivalence,
                         check_convexity_of_membership, common_attraction_predicate, estimate_cap_region,
                         is_common_attractive, orbit_bounded)
from .exceptions import CapError, FixedPointError, InvalidParameter, PhaseError
from .geometry import dist
from .mappings import (check_berinde_quasi_contractive, check_further_hybrid, check_nonexpansive,
                       check_normally_hybrid, check_quasi_nonexpansive, check_theorem_conditions,
                       check_widely_more_hybrid)
from .schemes import (COMPARISON_HEADER, MANN_TYPE, TOLERANCE_MET, TWO_MAP_PICARD_MANN, Probes,
                      boundedness_check, compare_schemes, energy_check, fejer_check,
                      projection_sequence_check, residual_limit_check, run_scheme)

logger = logging.getLogger(__name__)

PHASES = ('class-checks', 'theorem-conditions', 'cap-estimate', 'orbit', 'schemes', 'diagnostics',
          'comparison')
CHECK_PHASES = ('class-checks', 'theorem-conditions')
COMPARE_PHASES = ('comparison',)

FORMATS = ('csv', 'json')


@dataclass(frozen=True)
class Verdict:
    key: str
    observed: Optional[bool]
    expected: bool

    @property
    def passed(self):
        return self.observed is not None and self.observed == self.expected

    def to_json(self):
        return {'key': self.key, 'observed': self.observed, 'expected': self.expected, 'passed': self.passed}


def judge(observations, expected, complete=True):
    """
    Compare observations with expectations; unlisted observations are expected true.

    With ``complete`` an expectation nothing observed is a failed verdict.
    """
    verdicts = [Verdict(key, observed, expected.get(key, True)) for key, observed in observations.items()]
    if complete:
        verdicts += [Verdict(key, None, value) for key, value in sorted(expected.items())
                     if key not in observations]
    return verdicts


@dataclass
class RunBundle:
    scenario: object
    phases: tuple = PHASES
    class_reports: dict = field(default_factory=dict)
    conditions: Optional[object] = None
    cap_estimate: Optional[object] = None
    convexity: Optional[object] = None
    z_ref_membership: Optional[object] = None
    bridge: Optional[dict] = None
    equivalence: Optional[object] = None
    orbit: Optional[object] = None
    traces: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    comparison: list = field(default_factory=list)
    observations: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failures(self):
        return sum(not verdict.passed for verdict in self.verdicts) + (1 if self.error else 0)

    def observe(self, key, value):
        self.observations[key] = bool(value)

    def to_json(self):
        def optional(value):
            return None if value is None else value.to_json()

        return {
            'scenario': self.scenario.name,
            'phases': list(self.phases),
            'error': self.error,
            'class_checks': {key: report.to_json() for key, report in self.class_reports.items()},
            'theorem_conditions': optional(self.conditions),
            'cap_estimate': optional(self.cap_estimate),
            'convexity': optional(self.convexity),
            'z_ref': optional(self.z_ref_membership),
            'bridge': self.bridge,
            'equivalence': optional(self.equivalence),
            'orbit': optional(self.orbit),
            'schemes': {name: {'stop_reason': trace.stop_reason, 'iterations': trace.iterations,
                               'final': trace.final.to_json()}
                        for name, trace in self.traces.items()},
            'diagnostics': self.diagnostics,
            'comparison': [row.to_json() for row in self.comparison],
            'observations': self.observations,
            'verdicts': [verdict.to_json() for verdict in self.verdicts],
            'failures': self.failures,
        }


class ScenarioRun:
    """The phases of one scenario; each method fills its part of the bundle."""

    def __init__(self, scenario, bundle):
        self.sc = scenario
        self.bundle = bundle

    @cached_property
    def sample(self):
        return self.sc.domain_sample()

    def class_checks(self):
        sc = self.sc
        pairs = sc.pairs(self.sample)
        for who, m in (('S', sc.s), ('T', sc.t)):
            for check in sc.checks:
                report = self._class_check(check, m, pairs)
                key = f"{who}:{check}"
                self.bundle.class_reports[key] = report
                self.bundle.observe(key, report.holds)

    def _class_check(self, check, m, pairs):
        sc = self.sc
        if check == 'sgm':
            return check_further_hybrid(m, sc.params, pairs, sc.tol)
        if check == 'ngm':
            return check_normally_hybrid(m, sc.params, pairs, sc.tol)
        if check == 'wmgm':
            return check_widely_more_hybrid(m, sc.params, pairs, sc.tol)
        if check == 'nonexpansive':
            return check_nonexpansive(m, pairs, sc.tol)
        if check == 'berinde-quasi-contractive':
            a, weight = sc.certificate
            return check_berinde_quasi_contractive(m, a, weight, pairs, sc.tol)
        if check == 'quasi-nonexpansive':
            return check_quasi_nonexpansive(m, list(sc.fixed_points), self.sample, sc.tol)
        raise InvalidParameter(f"unknown class check {check!r}")

    def theorem_conditions(self):
        self.bundle.conditions = check_theorem_conditions(self.sc.params)
        self.bundle.observe('theorem-conditions', self.bundle.conditions.holds)

    def cap_estimate(self):
        sc, bundle = self.sc, self.bundle
        if sc.candidates is not None:
            bundle.cap_estimate = estimate_cap_region(sc.s, sc.t, self.sample, sc.candidates.grid(), sc.tol)
            bundle.observe('cap:nonempty', bundle.cap_estimate.members)
            bundle.convexity = check_convexity_of_membership(
                common_attraction_predicate(sc.s, sc.t, self.sample), bundle.cap_estimate.members,
                trials=sc.diagnostics.convexity_trials, seed=sc.seed, tol=sc.diagnostics.convexity_tol)
            bundle.observe('cap:convexity', bundle.convexity.passed)
        if sc.z_ref is not None:
            bundle.z_ref_membership = is_common_attractive(sc.s, sc.t, sc.z_ref, self.sample, sc.tol)
            bundle.observe('z_ref:attractive', bundle.z_ref_membership.holds)
            c = sc.domain.as_convex_set()
            if bundle.z_ref_membership.holds and c is not None:
                bundle.bridge = self._bridge(sc.s, sc.z_ref, c, sc.tol)
                bundle.observe('bridge', bundle.bridge['holds'])
        if sc.fixed_points:
            bundle.equivalence = check_cap_fixedpoint_equivalence(sc.s, sc.t, self.sample,
                                                                  list(sc.fixed_points), sc.tol)
            bundle.observe('equivalence', bundle.equivalence.passed)

    def _bridge(self, s, z, c, tol):
        try:
            u = cap_fixed_point_bridge(s, self.sc.t, z, c, tol)
        except FixedPointError as exc:
            return {'point': exc.point.to_json(), 'residual_s': exc.residual_s,
                    'residual_t': exc.residual_t, 'holds': False}
        return {'point': u.to_json(), 'residual_s': dist(s.eval(u, tol), u),
                'residual_t': dist(self.sc.t.eval(u, tol), u), 'holds': True}

    def orbit(self):
        plan = self.sc.orbit
        if plan is None:
            return
        self.bundle.orbit = orbit_bounded(self.sc.s, self.sc.t, plan.start, plan.horizon, plan.bound)
        self.bundle.observe('orbit', self.bundle.orbit.verdict == BOUNDED)

    def schemes(self):
        sc, plan = self.sc, self.sc.schemes
        if plan is None:
            return
        probes = Probes(z_ref=sc.z_ref, cap_set=sc.cap_set)
        for kind in plan.kinds:
            trace = run_scheme(kind, sc.s, sc.t, plan.x0, plan.steps, plan.stop, probes)
            self.bundle.traces[kind.name] = trace
            self.bundle.observe(f"{kind.name}:converged", trace.stop_reason == TOLERANCE_MET)

    def diagnostics(self):
        sc, diag = self.sc, self.sc.diagnostics
        c = sc.domain.as_convex_set()
        for name, trace in self.bundle.traces.items():
            found = {}
            if sc.z_ref is not None:
                found['fejer'] = fejer_check(trace, sc.z_ref, diag.fejer_tol).to_json()
                self.bundle.observe(f"{name}:fejer", found['fejer']['holds'])
                if name in MANN_TYPE:
                    found['energy'] = energy_check(trace, sc.z_ref, diag.energy_tol).to_json()
                    self.bundle.observe(f"{name}:energy", found['energy']['holds'])
                found['bounded'] = boundedness_check(trace, sc.z_ref)
                self.bundle.observe(f"{name}:bounded", found['bounded'])
            found['residual_limit'] = residual_limit_check(trace, diag.residual_tol, diag.window)
            self.bundle.observe(f"{name}:residual-limit", found['residual_limit'])
            if sc.cap_set is not None:
                found['projection_sequence'] = projection_sequence_check(
                    trace, diag.projection_tol, diag.window, diag.limit_tol).to_json()
                self.bundle.observe(f"{name}:projection-sequence", found['projection_sequence']['holds'])
            if c is not None and trace.stop_reason == TOLERANCE_MET:
                s = sc.s if name == TWO_MAP_PICARD_MANN else sc.t
                found['closed_limit'] = self._bridge(s, trace.final, c, diag.limit_tol)
                self.bundle.observe(f"{name}:closed-limit", found['closed_limit']['holds'])
            self.bundle.diagnostics[name] = found

    def comparison(self):
        if self.sc.schemes is None:
            return
        self.bundle.comparison = compare_schemes([self.sc.race()], self.sc.schemes.stop.tol)


def run_scenario(scenario, phases=PHASES):
    """
    Run the requested phases in their fixed order and judge the observations.

    A hard library error is re-raised as :class:`PhaseError` naming the phase.
    """
    bundle = RunBundle(scenario, phases=tuple(phase for phase in PHASES if phase in phases))
    run = ScenarioRun(scenario, bundle)
    for phase in bundle.phases:
        logger.info("%s: %s", scenario.name, phase)
        try:
            getattr(run, phase.replace('-', '_'))()
        except CapError as exc:
            raise PhaseError(phase, scenario.name, exc) from exc
    bundle.verdicts = judge(bundle.observations, scenario.expected, complete=bundle.phases == PHASES)
    failed = [verdict.key for verdict in bundle.verdicts if not verdict.passed]
    if failed:
        logger.info("%s: %d failed verdict(s): %s", scenario.name, len(failed), ', '.join(failed))
    return bundle


def _run_guarded(scenario, phases):
    try:
        return run_scenario(scenario, phases)
    except PhaseError as exc:
        logger.error("%s", exc)
        return RunBundle(scenario, phases=tuple(phases), error=str(exc))


def run_suite(scenarios, phases=PHASES, workers=None):
    """
    Run scenarios, ``CAP_SUITE_WORKERS`` at a time, and return bundles in input order.

    A scenario failing with a hard error yields a bundle carrying ``error``.
    """
    workers = settings.CAP_SUITE_WORKERS if workers is None else workers
    if workers <= 1:
        return [_run_guarded(scenario, phases) for scenario in scenarios]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda scenario: _run_guarded(scenario, phases), scenarios))


# Output

def trace_header(dim):
    return ['n', *(f"x_{i}" for i in range(1, dim + 1)), 'residual_T', 'residual_S', 'dist_to_zref',
            'proj_step_delta']


def _cell(values, index):
    if values is None or index >= len(values):
        return ''
    return repr(values[index])


def trace_rows(trace):
    """One row per iterate; absent quantities are empty cells."""
    deltas = None
    if trace.projections is not None:
        deltas = [None] + [dist(a, b) for a, b in zip(trace.projections, trace.projections[1:])]
    rows = []
    for index, x in enumerate(trace.iterates):
        delta = '' if deltas is None or deltas[index] is None else repr(deltas[index])
        rows.append([str(index + 1), *(repr(value) for value in x),
                     _cell(trace.residuals_t, index), _cell(trace.residuals_s, index),
                     _cell(trace.distances, index), delta])
    return rows


def _write_csv(path, header, rows):
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')


def emit(bundle, output_format, out_dir):
    """
    Write ``<out_dir>/<scenario>/``: a trace file per scheme run, ``summary.json``,
    ``comparison.csv`` and the normalized ``scenario.json``.

    Files are staged in a temporary sibling directory and moved into place in
    one rename, so a failed write leaves no partial scenario directory.
    """
    if output_format not in FORMATS:
        raise InvalidParameter(f"unknown output format {output_format!r}, choose from {', '.join(FORMATS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / bundle.scenario.name
    staging = Path(tempfile.mkdtemp(prefix=f".{bundle.scenario.name}-", dir=out_dir))
    names = []
    try:
        for name, trace in bundle.traces.items():
            if output_format == 'csv':
                names.append(f"trace_{name}.csv")
                _write_csv(staging / names[-1], trace_header(trace.final.dim), trace_rows(trace))
            else:
                names.append(f"trace_{name}.json")
                _write_json(staging / names[-1], trace.to_json())
        names += ['summary.json', 'comparison.csv', 'scenario.json']
        _write_json(staging / 'summary.json', bundle.to_json())
        _write_csv(staging / 'comparison.csv', COMPARISON_HEADER, [row.to_csv() for row in bundle.comparison])
        _write_json(staging / 'scenario.json', bundle.scenario.to_json())
        staging.chmod(0o755)
        if target.exists():
            shutil.rmtree(target)
        staging.rename(target)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    logger.debug("wrote %d files to %s", len(names), target)
    return [target / name for name in names]
