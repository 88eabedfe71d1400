import numpy as np
from django.test import SimpleTestCase, override_settings

from cap.exceptions import DimensionMismatch, InvalidParameter, ProjectionNotConverged
from cap.geometry import Point, dist
from cap.projection import (AffineSubspace, Ball, Box, ConvexSet, Halfspace, Hyperplane, Intersection,
                            dykstra, variational_gap)


def triangle():
    """The unit simplex of the plane, {x, y >= 0, x + y <= 1}."""
    return Intersection([Box([0.0, 0.0], [1.0, 1.0]), Halfspace([1.0, 1.0], 1.0)])


class ClosedFormProjectionTests(SimpleTestCase):

    def test_halfspace(self):
        s = Halfspace([1.0, 0.0], 0.0)
        self.assertEqual(s.project(Point.of(2.0, 3.0)), Point.of(0.0, 3.0))
        self.assertEqual(s.project(Point.of(-2.0, 3.0)), Point.of(-2.0, 3.0))

    def test_hyperplane(self):
        s = Hyperplane([0.0, 2.0], 2.0)
        self.assertEqual(s.project(Point.of(5.0, -4.0)), Point.of(5.0, 1.0))

    def test_box_clips(self):
        s = Box([-1.0, -1.0], [1.0, 1.0])
        self.assertEqual(s.project(Point.of(2.0, -0.5)), Point.of(1.0, -0.5))

    def test_ball(self):
        p = Ball([0.0, 0.0], 1.0).project(Point.of(3.0, 4.0))
        self.assertTrue(np.allclose(p.coords, [0.6, 0.8]))

    def test_zero_radius_ball_is_a_singleton(self):
        s = Ball([0.2, 0.1], 0.0)
        self.assertEqual(s.project(Point.of(5.0, 5.0)), Point.of(0.2, 0.1))

    def test_affine_line(self):
        s = AffineSubspace([0.0, 1.0], [[1.0, 1.0]])
        p = s.project(Point.of(2.0, 0.0))
        self.assertTrue(np.allclose(p.coords, [0.5, 1.5]))

    def test_invalid_sets_are_rejected(self):
        with self.assertRaises(InvalidParameter):
            Box([1.0], [0.0])
        with self.assertRaises(InvalidParameter):
            Ball([0.0], -1.0)
        with self.assertRaises(InvalidParameter):
            Halfspace([0.0, 0.0], 1.0)
        with self.assertRaises(InvalidParameter):
            AffineSubspace([0.0, 0.0, 0.0], [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        with self.assertRaises(DimensionMismatch):
            Box([0.0], [1.0]).project(Point.of(0.5, 0.5))

    def test_projections_are_idempotent_and_variational(self):
        rng = np.random.default_rng(23)
        sets = [Halfspace([1.0, -2.0, 0.5], 0.3), Box([-1.0, 0.0, -2.0], [1.0, 0.5, 2.0]),
                Ball([0.5, 0.5, 0.5], 0.7), AffineSubspace([1.0, 0.0, 0.0], [[0.0, 1.0, 1.0]]),
                Hyperplane([1.0, 1.0, 1.0], 1.0)]
        for s in sets:
            for _ in range(200):
                x = Point(rng.normal(scale=2.0, size=3))
                p = s.project(x)
                self.assertLessEqual(dist(s.project(p), p), 1e-12)
                z = s.project(Point(rng.normal(scale=2.0, size=3)))
                self.assertGreaterEqual(variational_gap(s, x, z), -1e-12)

    def test_variational_gap_needs_a_member(self):
        with self.assertRaises(InvalidParameter):
            variational_gap(Ball([0.0], 1.0), Point.of(3.0), Point.of(2.0))

    def test_json_dispatch(self):
        s = ConvexSet.from_json({'kind': 'intersection', 'sets': [
            {'kind': 'halfspace', 'normal': [1.0], 'offset': 0.0},
            {'kind': 'ball', 'center': [0.0], 'radius': 10.0},
        ]})
        self.assertEqual(ConvexSet.from_json(s.to_json()).to_json(), s.to_json())
        with self.assertRaises(InvalidParameter):
            ConvexSet.from_json({'kind': 'simplex'})

    def test_projections_are_nonexpansive(self):
        rng = np.random.default_rng(29)
        sets = [(Halfspace([1.0, -2.0], 0.3), 1e-9), (Hyperplane([1.0, 1.0], 1.0), 1e-9),
                (Box([-1.0, 0.0], [1.0, 0.5]), 1e-9), (Ball([0.5, 0.5], 0.7), 1e-9),
                (AffineSubspace([1.0, 0.0], [[0.0, 1.0]]), 1e-9), (triangle(), 1e-8)]
        for s, slack in sets:
            with self.subTest(set=s.describe()):
                for _ in range(200):
                    x, y = Point(rng.normal(scale=2.0, size=2)), Point(rng.normal(scale=2.0, size=2))
                    self.assertLessEqual(dist(s.project(x), s.project(y)), dist(x, y) + slack)

    def test_projection_is_the_nearest_grid_member(self):
        rng = np.random.default_rng(31)
        axis = np.linspace(-2.0, 2.0, 101)
        plane = np.array([[a, b] for a in axis for b in axis])
        sets = [Box([-0.5], [0.7]), Ball([0.3], 0.4), Halfspace([1.0], 0.2),
                Halfspace([1.0, 1.0], 0.5), Box([-1.0, 0.0], [0.5, 1.5]), Ball([0.2, -0.3], 0.9),
                Hyperplane([1.0, -1.0], 0.0), triangle()]
        for s in sets:
            grid = axis.reshape(-1, 1) if s.dim == 1 else plane
            members = np.array([g for g in grid if s.contains(Point(g))])
            with self.subTest(set=s.describe()):
                self.assertTrue(len(members))
                for _ in range(20):
                    x = rng.uniform(-2.5, 2.5, size=s.dim)
                    nearest = float(np.min(np.linalg.norm(members - x, axis=1)))
                    self.assertLessEqual(dist(Point(x), s.project(Point(x))), nearest + 1e-6)


class DykstraTests(SimpleTestCase):

    def test_nearest_point_of_an_intersection(self):
        # alternating projections stop at (0.75, 0.25); the true projection is the vertex
        result = dykstra(triangle().sets, Point.of(2.0, 0.5))
        self.assertLessEqual(result.residual, 1e-10)
        self.assertTrue(np.allclose(result.point.coords, [1.0, 0.0], atol=1e-8))

    def test_intersection_agrees_with_closed_form(self):
        ball = Ball([0.0, 0.0], 1.0)
        s = Intersection([ball, Halfspace([1.0, 0.0], 0.5)])
        x = Point.of(0.2, 3.0)
        self.assertTrue(np.allclose(s.project(x).coords, ball.project(x).coords, atol=1e-7))
        self.assertTrue(s.contains(Point.of(0.0, 0.0)))
        self.assertFalse(s.contains(Point.of(0.9, 0.0)))

    def test_random_points_satisfy_the_variational_inequality(self):
        rng = np.random.default_rng(5)
        s = triangle()
        for _ in range(100):
            x = Point(rng.uniform(-2.0, 3.0, size=2))
            z = s.project(Point(rng.uniform(-2.0, 3.0, size=2)))
            self.assertGreaterEqual(variational_gap(s, x, z, tol=1e-8), -1e-8)

    def test_orthogonal_halfspaces_match_the_clamp(self):
        quadrant = Intersection([Halfspace([1.0, 0.0], 0.0), Halfspace([0.0, 1.0], 0.0)])
        self.assertTrue(np.allclose(quadrant.project(Point.of(1.0, 1.0)).coords, [0.0, 0.0], atol=1e-8))
        rng = np.random.default_rng(37)
        for _ in range(200):
            x = rng.normal(scale=3.0, size=2)
            projected = quadrant.project(Point(x)).coords
            self.assertLessEqual(float(np.max(np.abs(projected - np.minimum(x, 0.0)))), 1e-8)

    @override_settings(CAP_DYKSTRA_MAX_ITERS=1)
    def test_iteration_cap_is_a_soft_error(self):
        with self.assertRaises(ProjectionNotConverged) as caught:
            triangle().project(Point.of(2.0, 0.5))
        self.assertEqual(caught.exception.iterations, 1)
        self.assertEqual(caught.exception.point.dim, 2)

    def test_empty_intersection_is_rejected(self):
        with self.assertRaises(InvalidParameter):
            Intersection([])
