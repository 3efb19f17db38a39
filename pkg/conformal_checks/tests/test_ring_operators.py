import random
from fractions import Fraction

from django.test import SimpleTestCase

from conformal_checks.exceptions import PointRejected
from conformal_checks.operators import DiffOperator
from conformal_checks.ring import AlgebraicRing, random_point, random_test_function
from conformal_checks.tensors import Scalar


class AlgebraicRingTests(SimpleTestCase):
    def setUp(self):
        self.ring = AlgebraicRing(2)

    def test_energy_squares_to_norm(self):
        r = self.ring
        self.assertEqual(r.omega(1) * r.omega(1), r.q(1))
        self.assertEqual(r.q(1), r.k(1, 1) * r.k(1, 1) + r.k(1, 2) * r.k(1, 2) + r.k(1, 3) * r.k(1, 3))

    def test_mass_powers(self):
        r = self.ring
        self.assertEqual(r.sigma_power(2), r.s())
        self.assertEqual(r.sigma_power(-1) * r.sigma_power(1), r.one)
        self.assertEqual(r.sigma_power(-2) * r.s(), 1)
        self.assertEqual(r.omega_power(2, -1) * r.omega(2), 1)

    def test_imaginary_unit(self):
        r = self.ring
        i = r.scalar(Scalar(0, 1))
        self.assertEqual(i * i, -1)

    def test_single_particle_is_massless(self):
        self.assertTrue(AlgebraicRing(1).s().is_zero())

    def test_derivatives(self):
        r = self.ring
        self.assertEqual(r.k(1, 1).diff(0), 1)
        self.assertTrue(r.k(2, 1).diff(0).is_zero())
        # d w / d k = k / w
        self.assertEqual(r.omega(1).diff(0), r.k(1, 1) * r.omega_power(1, -1))
        # d sigma^2 / d k equals 2 sigma d sigma / d k
        self.assertEqual(r.s().diff(2), r.sigma_power(1).diff(2) * r.sigma_power(1) * 2)

    def test_quotient_rule(self):
        r = self.ring
        f = r.k(1, 2) * r.omega_power(1, -2)
        expected = r.omega_power(1, -2) - r.k(1, 2) * r.k(1, 2) * r.omega_power(1, -4) * 2
        self.assertEqual(f.diff(1), expected)

    def test_evaluation(self):
        r = self.ring
        point = r.point([(0, 0, 1), (0, 0, -1)])
        self.assertEqual(r.k(1, 3).evaluate(point), Scalar(1))
        self.assertEqual(r.s().evaluate(point), Scalar(4))
        self.assertEqual(r.sigma_power(-1).evaluate(point), Scalar(Fraction(1, 2)))

    def test_irrational_energy_rejected(self):
        with self.assertRaises(PointRejected):
            self.ring.point([(1, 1, 0), (0, 0, 1)])

    def test_vanishing_denominator_rejected(self):
        point = self.ring.point([(0, 0, 1), (0, 0, 2)])
        with self.assertRaises(PointRejected):
            self.ring.sigma_power(-1).evaluate(point)

    def test_random_points_are_admissible(self):
        rng = random.Random(1)
        for _ in range(20):
            point = random_point(self.ring, rng)
            self.assertNotEqual(self.ring.s().evaluate(point), Scalar(0))

    def test_parameters(self):
        ring = AlgebraicRing(1, ("b",))
        value = ring.parameter("b") * ring.k(1, 1) + ring.k(1, 2)
        self.assertEqual(value.substitute({"b": 3}), ring.k(1, 1) * 3 + ring.k(1, 2))


class DiffOperatorTests(SimpleTestCase):
    def setUp(self):
        self.ring = AlgebraicRing(2)

    def test_canonical_commutator(self):
        r = self.ring
        d = DiffOperator.derivative(r, 1, 2)
        k = DiffOperator.multiplication(r.k(1, 2))
        self.assertEqual(d.commutator(k), DiffOperator.constant(r, 1))
        self.assertTrue(d.commutator(DiffOperator.multiplication(r.k(2, 2))).is_zero())

    def test_normalized_bracket(self):
        r = self.ring
        d = DiffOperator.derivative(r, 1, 1)
        k = DiffOperator.multiplication(r.k(1, 1))
        self.assertEqual(d.normalized_bracket(k), DiffOperator.constant(r, Scalar(0, -1)))

    def test_composition_is_associative(self):
        r = self.ring
        a = DiffOperator.derivative(r, 1, 1) + DiffOperator.multiplication(r.omega(1))
        b = DiffOperator.derivative(r, 2, 3).scale(r.k(1, 1))
        c = DiffOperator.multiplication(r.sigma_power(1))
        self.assertEqual((a @ b) @ c, a @ (b @ c))

    def test_apply(self):
        r = self.ring
        f = r.k(1, 1) * r.k(1, 1) * r.k(2, 3)
        op = DiffOperator.derivative(r, 1, 1, order=2)
        self.assertEqual(op.apply(f), r.k(2, 3) * 2)

    def test_composition_matches_application(self):
        r = self.ring
        rng = random.Random(4)
        a = DiffOperator.derivative(r, 1, 2).scale(r.omega(2))
        b = DiffOperator.derivative(r, 2, 1) + DiffOperator.multiplication(r.k(1, 3))
        for _ in range(5):
            f = random_test_function(r, rng)
            self.assertEqual((a @ b).apply(f), a.apply(b.apply(f)))

    def test_identity_on_test_function(self):
        r = self.ring
        point = r.point([(0, 0, 1), (0, 0, -1)])
        self.assertEqual(DiffOperator.constant(r, 1).apply(r.k(1, 3)).evaluate(point), Scalar(1))

    def random_operator(self, rng):
        r = self.ring
        out = DiffOperator.multiplication(random_test_function(r, rng, terms=2, degree=2))
        for _ in range(2):
            a, j = rng.randint(1, 2), rng.randint(1, 3)
            coefficient = random_test_function(r, rng, terms=2, degree=2) * r.sigma_power(rng.choice((-1, 1)))
            out = out + DiffOperator.derivative(r, a, j, order=rng.randint(1, 2)).scale(coefficient)
        return out

    def test_commutator_matches_both_compositions(self):
        rng = random.Random(12)
        for _ in range(6):
            a, b = self.random_operator(rng), self.random_operator(rng)
            self.assertEqual(a.commutator(b), a @ b - b @ a)
            self.assertTrue(a.commutator(a).is_zero())

    def test_derivatives_are_memoized(self):
        r = AlgebraicRing(2)
        f = r.omega(1) * r.sigma_power(-1)
        first = r.derivative(f, (1, 0, 0, 0, 0, 2))
        self.assertIs(r.derivative(f, (1, 0, 0, 0, 0, 2)), first)
        self.assertEqual(first, f.diff(0).diff(5).diff(5))
        r.derivative_limit = 1
        r.derivative(r.k(1, 1), (0, 1, 0, 0, 0, 0))
        self.assertLessEqual(len(r._derivatives), 1)
