import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, seed, settings as hypothesis_settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cap.exceptions import DimensionMismatch, InvalidParameter
from cap.geometry import (Point, Tolerance, dist, inner, mann_combination, norm, norm_sq,
                          polarization_gap)


class PointTests(SimpleTestCase):

    def test_coordinates_are_read_only(self):
        p = Point.of(1.0, 2.0)
        with self.assertRaises(ValueError):
            p.coords[0] = 5.0
        self.assertEqual(p.to_json(), [1.0, 2.0])

    def test_rejects_non_finite_and_empty(self):
        for bad in ([float('nan')], [1.0, float('inf')], []):
            with self.assertRaises(InvalidParameter):
                Point(bad)

    def test_scalar_becomes_one_dimensional(self):
        self.assertEqual(Point(3.0).dim, 1)

    def test_arithmetic_checks_dimensions(self):
        with self.assertRaises(DimensionMismatch):
            Point.of(1.0, 2.0) + Point.of(1.0)
        self.assertEqual(Point.of(1.0, 2.0) - Point.of(0.5, 0.5), Point.of(0.5, 1.5))
        self.assertEqual(2 * Point.of(1.0, -1.0), Point.of(2.0, -2.0))
        self.assertEqual(Point.of(3.0) / 2, Point.of(1.5))

    def test_equal_points_hash_alike(self):
        self.assertEqual(len({Point.of(1.0, 2.0), Point.of(1.0, 2.0)}), 1)

    def test_from_json_needs_a_list(self):
        with self.assertRaises(InvalidParameter):
            Point.from_json({'x': 1})


class HilbertSpaceTests(SimpleTestCase):

    def test_inner_products_and_norms(self):
        u, v = Point.of(3.0, 4.0), Point.of(1.0, 0.0)
        self.assertEqual(inner(u, v), 3.0)
        self.assertEqual(norm_sq(u), 25.0)
        self.assertEqual(norm(u), 5.0)
        self.assertEqual(dist(u, v), np.sqrt(20.0))

    def test_polarization_identity_on_seeded_tuples(self):
        rng = np.random.default_rng(20240601)
        worst = 0.0
        for trial in range(10_000):
            dim = 1 + trial % 5
            u, v, p, w = (Point(rng.normal(scale=3.0, size=dim)) for _ in range(4))
            worst = max(worst, abs(polarization_gap(u, v, p, w)))
        self.assertLess(worst, 1e-9)

    @seed(1)
    @hypothesis_settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, (4, 3), elements=st.floats(min_value=-1e3, max_value=1e3)))
    def test_polarization_identity_property(self, rows):
        u, v, p, w = (Point(row) for row in rows)
        scale = 1.0 + max(norm_sq(point) for point in (u, v, p, w))
        self.assertLessEqual(abs(polarization_gap(u, v, p, w)), 1e-12 * scale)

    def test_mann_combination_needs_an_open_unit_step(self):
        x, tx = Point.of(0.0), Point.of(1.0)
        self.assertEqual(mann_combination(x, tx, 0.25), Point.of(0.25))
        for alpha in (0.0, 1.0, 1.5):
            with self.assertRaisesMessage(InvalidParameter, "outside (0,1)"):
                mann_combination(x, tx, alpha)

    def test_convex_combination_identity(self):
        rng = np.random.default_rng(7)
        for trial in range(2000):
            dim = 1 + trial % 4
            x, tx, z = (Point(rng.normal(scale=2.0, size=dim)) for _ in range(3))
            alpha = float(rng.uniform(0.01, 0.99))
            left = norm_sq(mann_combination(x, tx, alpha) - z)
            right = ((1.0 - alpha) * norm_sq(x - z) + alpha * norm_sq(tx - z)
                     - alpha * (1.0 - alpha) * norm_sq(tx - x))
            scale = 1.0 + max(norm_sq(x - z), norm_sq(tx - z), norm_sq(tx - x))
            self.assertLessEqual(abs(left - right), 1e-9 * scale)

    def test_mann_combination_stays_on_the_segment(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            x, tx = Point(rng.normal(size=3)), Point(rng.normal(size=3))
            alpha = float(rng.uniform(0.01, 0.99))
            m = mann_combination(x, tx, alpha)
            length = dist(x, tx)
            self.assertAlmostEqual(dist(x, m) + dist(m, tx), length, delta=1e-9 * (1.0 + length))
            self.assertAlmostEqual(dist(x, m), alpha * length, delta=1e-9 * (1.0 + length))


class ToleranceTests(SimpleTestCase):

    @override_settings(CAP_ATOL=1e-6, CAP_RTOL=1e-3)
    def test_default_reads_settings(self):
        tol = Tolerance.default()
        self.assertEqual((tol.atol, tol.rtol), (1e-6, 1e-3))
        self.assertAlmostEqual(tol.bound(10.0), 1e-6 + 1e-2)

    @override_settings(CAP_RTOL=1e-3)
    def test_caller_atol_keeps_the_relative_part(self):
        tol = Tolerance.default(1e-6)
        self.assertEqual((tol.atol, tol.rtol), (1e-6, 1e-3))

    def test_close(self):
        tol = Tolerance(atol=1e-9, rtol=1e-6)
        self.assertTrue(tol.close(1000.0, 1000.0005))
        self.assertFalse(tol.close(1.0, 1.001))


class PointParsingTests(SimpleTestCase):

    def test_non_numeric_coordinates(self):
        for bad in (['a'], [[1.0], [1.0, 2.0]], [{'x': 1.0}], [[1.0, 2.0]]):
            with self.subTest(coords=bad), self.assertRaises(InvalidParameter):
                Point(bad)

    def test_json_points_hold_numbers_only(self):
        for bad in (['0.5'], [True], [None], [[0.5]]):
            with self.subTest(data=bad), self.assertRaises(InvalidParameter):
                Point.from_json(bad)
        self.assertEqual(Point.from_json([1, 2.5]), Point.of(1.0, 2.5))
