import math
from dataclasses import replace
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from cap.attractive import is_attractive_point
from cap.exceptions import DomainError, FixedPointError, InvalidParameter
from cap.geometry import Point
from cap.mappings import (HOLDS, VIOLATED, Berinde, BoxDomain, Constant, DomainSpec, FiniteDomain, HybridParams,
                          IntervalDomain, MappingSpec, ProjectionComposed, Rotation2D, Scale, Translation,
                          berinde_embedding_params, berinde_residual_weight, check_berinde_quasi_contractive,
                          check_further_hybrid, check_nonexpansive, check_normally_hybrid,
                          check_quasi_nonexpansive, check_theorem_conditions, check_widely_more_hybrid,
                          pair_grid, random_pairs)
from cap.projection import Halfspace
from cap.scenarios import load_scenario

UNIT = IntervalDomain(-1.0, 1.0)


def bundled_scenarios():
    return [load_scenario(path) for path in sorted(Path(settings.CAP_BUNDLED_DIR).glob('*.json'))]


class DomainTests(SimpleTestCase):

    def test_interval_grid_and_window(self):
        self.assertEqual([p[0] for p in UNIT.grid(3)], [-1.0, 0.0, 1.0])
        line = IntervalDomain(window=2.0)
        self.assertEqual(line.sample_range, (-2.0, 2.0))
        self.assertTrue(line.contains(Point.of(1e12)))

    def test_seeded_samples_repeat(self):
        box = BoxDomain([0.0, 0.0], [1.0, 2.0])
        self.assertEqual(box.sample(10, seed=4), box.sample(10, seed=4))
        self.assertEqual(len(box.sample(5)), 25)

    def test_finite_domain_is_not_assumed_convex(self):
        two = FiniteDomain([[0.0], [1.0]])
        self.assertFalse(two.is_convex)
        self.assertIsNone(two.as_convex_set())
        self.assertEqual(two.sample(), [Point.of(0.0), Point.of(1.0)])

    def test_json_dispatch(self):
        line = DomainSpec.from_json({'kind': 'interval', 'lower': '-inf', 'upper': 'inf'})
        self.assertEqual(line.to_json()['lower'], '-inf')
        self.assertEqual(DomainSpec.from_json(line.to_json()), line)
        with self.assertRaises(InvalidParameter):
            DomainSpec.from_json({'kind': 'torus'})


class MappingTests(SimpleTestCase):

    def test_evaluation_checks_the_domain(self):
        with self.assertRaises(DomainError):
            Scale(0.5, UNIT).eval(Point.of(2.0))
        with self.assertRaises(DomainError):
            Scale(2.0, UNIT, self_map=True).eval(Point.of(0.8))
        self.assertEqual(Scale(2.0, UNIT).eval(Point.of(0.8)), Point.of(1.6))

    def test_berinde_map(self):
        t = Berinde(0.5, 0.5)
        self.assertEqual(t.eval(Point.of(0.5)), Point.of(0.25))
        self.assertEqual(t.eval(Point.of(1.0)), Point.of(0.25))
        self.assertEqual(berinde_residual_weight(0.5), 0.5)
        with self.assertRaises(InvalidParameter):
            Berinde(0.5, 0.4)

    def test_projection_composed_round_trip(self):
        m = ProjectionComposed(Scale(2.0, UNIT), Halfspace([1.0], 0.5))
        self.assertAlmostEqual(m.eval(Point.of(0.9))[0], 0.5)
        self.assertEqual(MappingSpec.from_json(m.to_json()), m)

    def test_mapping_json_needs_a_known_family(self):
        with self.assertRaises(InvalidParameter):
            MappingSpec.from_json({'family': 'shear'}, UNIT)
        with self.assertRaises(InvalidParameter):
            MappingSpec.from_json({'family': 'scale'}, UNIT)

    def test_malformed_fields_are_invalid_parameters(self):
        bad_domains = [
            {'kind': 'interval', 'lower': 'abc', 'upper': 1.0},
            {'kind': 'interval', 'lower': [0.0], 'upper': 1.0},
            {'kind': 'box', 'lower': ['a'], 'upper': [1.0]},
            {'kind': 'finite', 'points': 5},
        ]
        for data in bad_domains:
            with self.subTest(domain=data), self.assertRaises(InvalidParameter):
                DomainSpec.from_json(data)
        square = BoxDomain([-1.0, -1.0], [1.0, 1.0])
        bad_mappings = [
            {'family': 'affine', 'matrix': [[1.0], [1.0, 2.0]], 'offset': [0.0, 0.0]},
            {'family': 'affine', 'matrix': [['a', 0.0], [0.0, 1.0]], 'offset': [0.0, 0.0]},
            {'family': 'constant', 'value': {'x': 0.0}},
            {'family': 'scale', 'factor': 'half'},
        ]
        for data in bad_mappings:
            with self.subTest(mapping=data), self.assertRaises(InvalidParameter):
                MappingSpec.from_json(data, square)


class ClassCheckTests(SimpleTestCase):

    def setUp(self):
        self.pairs = pair_grid(UNIT.sample(41))

    def test_contraction_is_further_hybrid(self):
        report = check_further_hybrid(Scale(0.5, UNIT), HybridParams(1.0, 0.0, 0.0, -0.25, 0.0), self.pairs)
        self.assertEqual(report.verdict, HOLDS)
        self.assertEqual(report.pairs_tested, 41 * 41)
        self.assertIsNone(report.witness)

    def test_expansion_is_caught_with_a_witness(self):
        line = IntervalDomain(window=1.0)
        report = check_further_hybrid(Scale(2.0, line), HybridParams(1.0, 0.0, 0.0, -1.0, 0.0),
                                      pair_grid(line.sample(41)))
        self.assertEqual(report.verdict, VIOLATED)
        x, y = report.witness
        self.assertAlmostEqual(report.max_violation, 3.0 * (x[0] - y[0]) ** 2)
        self.assertFalse(check_nonexpansive(Scale(2.0, line), pair_grid(line.sample(11))).holds)

    def test_rotation_is_an_isometry(self):
        disc = BoxDomain([-1.0, -1.0], [1.0, 1.0])
        pairs = pair_grid(disc.sample(9))
        self.assertTrue(check_further_hybrid(Rotation2D(math.pi / 5, disc),
                                             HybridParams(1.0, 0.0, 0.0, -1.0, 0.0), pairs).holds)
        self.assertTrue(check_nonexpansive(Rotation2D(math.pi / 5, disc), pairs).holds)

    def test_berinde_map_is_quasi_contractive_not_nonexpansive(self):
        t = Berinde(0.5, 0.5)
        pairs = pair_grid(t.domain.sample(41))
        self.assertTrue(check_berinde_quasi_contractive(t, 0.5, 0.5, pairs).holds)
        self.assertFalse(check_nonexpansive(t, pairs).holds)
        self.assertTrue(check_further_hybrid(t, berinde_embedding_params(0.5, 0.5), pairs).holds)

    def test_embedding_params(self):
        self.assertEqual(berinde_embedding_params(0.5, 0.5), HybridParams(1.0, 0.0, 0.0, -0.5, -0.5))

    def test_class_reduction_chain_on_bundled_mappings(self):
        for scenario in bundled_scenarios():
            domain = scenario.domain
            points = domain.sample(41) if domain.dim == 1 else domain.sample(41, seed=scenario.seed)
            pairs = pair_grid(points)
            p = replace(scenario.params, varsigma=None, eta=None)
            for m in (scenario.s, scenario.t):
                with self.subTest(scenario=scenario.name, mapping=m.describe()):
                    ngm = check_normally_hybrid(m, p, pairs)
                    sgm_without_residual = check_further_hybrid(m, replace(p, epsilon=0.0), pairs)
                    self.assertLess(abs(ngm.max_violation - sgm_without_residual.max_violation), 1e-12)
                    self.assertEqual(ngm.witness, sgm_without_residual.witness)
                    sgm = check_further_hybrid(m, p, pairs)
                    wmgm = check_widely_more_hybrid(m, replace(p, varsigma=0.0, eta=0.0), pairs)
                    self.assertLess(abs(sgm.max_violation - wmgm.max_violation), 1e-12)
                    self.assertEqual(sgm.witness, wmgm.witness)

    def test_widely_more_check_needs_its_extra_coefficients(self):
        with self.assertRaises(InvalidParameter):
            check_widely_more_hybrid(Scale(0.5, UNIT), HybridParams(1.0, 0.0, 0.0, -0.25, 0.0), self.pairs)

    def test_quasi_nonexpansive(self):
        sample = UNIT.sample(41)
        self.assertTrue(check_quasi_nonexpansive(Scale(0.5, UNIT), [Point.of(0.0)], sample).holds)
        with self.assertRaises(FixedPointError):
            check_quasi_nonexpansive(Constant([0.0], UNIT), [Point.of(0.5)], sample)

    def test_random_pairs_repeat_with_the_seed(self):
        points = UNIT.sample(41)
        self.assertEqual(random_pairs(points, 100, seed=9), random_pairs(points, 100, seed=9))

    def test_reports_repeat_bit_for_bit(self):
        disc = BoxDomain([-1.0, -1.0], [1.0, 1.0])
        pairs = random_pairs(disc.sample(40, seed=3), 2000, seed=3)
        m = Rotation2D(0.7, disc)
        p = HybridParams(1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0)
        checks = [
            lambda: check_further_hybrid(m, p, pairs),
            lambda: check_normally_hybrid(m, p, pairs),
            lambda: check_widely_more_hybrid(m, p, pairs),
            lambda: check_nonexpansive(m, pairs),
            lambda: check_berinde_quasi_contractive(m, 0.9, 1.0, pairs),
        ]
        for check in checks:
            self.assertEqual(check().to_json(), check().to_json())

    def test_translation_has_a_constant_displacement(self):
        line = IntervalDomain(window=2.0)
        report = check_widely_more_hybrid(Translation([0.3], line), HybridParams(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
                                          pair_grid(line.sample(41)))
        self.assertEqual(report.verdict, HOLDS)
        self.assertLess(report.max_violation, 1e-20)

    def test_quasi_nonexpansive_fixed_points_are_attractive(self):
        for scenario in bundled_scenarios():
            if not scenario.fixed_points:
                continue
            sample = scenario.domain_sample()
            for m in (scenario.s, scenario.t):
                if not check_quasi_nonexpansive(m, scenario.fixed_points, sample).holds:
                    continue
                for z in scenario.fixed_points:
                    with self.subTest(scenario=scenario.name, mapping=m.describe(), z=z.to_json()):
                        self.assertTrue(is_attractive_point(m, z, sample))

    @override_settings(CAP_RTOL=1e-3)
    def test_thresholds_follow_the_tolerance_policy(self):
        p = HybridParams(1.0, 0.0, 0.0, -0.25, 0.0)
        # the largest squared norm on the [-1, 1] grid is 1
        self.assertEqual(check_further_hybrid(Scale(0.5, UNIT), p, self.pairs, tol=1e-6).tolerance, 1e-6 + 1e-3)
        self.assertEqual(check_nonexpansive(Scale(0.5, UNIT), self.pairs, tol=1e-6).tolerance, 1e-6 + 1e-3)
        with override_settings(CAP_RTOL=0.0):
            self.assertEqual(check_further_hybrid(Scale(0.5, UNIT), p, self.pairs, tol=1e-6).tolerance, 1e-6)


class TheoremConditionTests(SimpleTestCase):

    def test_truth_table(self):
        table = [
            ((1.0, 0.0, 0.0, -1.0, 0.0), True, "all conditions hold"),
            ((1.0, 0.0, 0.0, -1.0000001, 0.0), False, "α+β+γ+δ ≥ 0 fails"),
            ((1.0, 0.0, 0.0, 0.0, 0.0), True, "all conditions hold"),
            ((1.0, 0.0, 0.0, 0.0, -1e-12), False, "ε ≥ 0 fails"),
            ((0.0, 0.0, 0.0, 0.0, 0.0), False, "neither α+β>0 nor α+γ>0"),
            ((0.0, 1.0, 0.0, -1.0, 0.0), True, "all conditions hold"),
            ((0.0, 0.0, 1.0, -1.0, 0.0), True, "all conditions hold"),
            ((1.0, -1.0, -1.0, 1.0, 0.0), False, "neither α+β>0 nor α+γ>0"),
        ]
        for coefficients, holds, reason in table:
            with self.subTest(coefficients=coefficients):
                verdict = check_theorem_conditions(HybridParams(*coefficients))
                self.assertEqual(bool(verdict), holds)
                self.assertEqual(verdict.reason, reason)

    def test_params_json(self):
        with self.assertRaises(InvalidParameter):
            HybridParams.from_json({'alpha': 1.0})
        p = HybridParams(1.0, 0.0, 0.0, -0.25, 0.0, varsigma=0.0, eta=0.0)
        self.assertEqual(HybridParams.from_json(p.to_json()), p)
