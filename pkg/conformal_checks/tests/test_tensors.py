import random
from fractions import Fraction

from django.test import SimpleTestCase

from conformal_checks.exceptions import IndexPairingError
from conformal_checks.tensors import (
    I,
    CoefficientExpr,
    Scalar,
    accel,
    canonicalize,
    delta,
    epsilon,
    epsilon_component,
    eta,
    lo,
    metric_component,
    up,
)


class ScalarTests(SimpleTestCase):
    def test_gaussian_arithmetic(self):
        self.assertEqual(I * I, Scalar(-1))
        self.assertEqual(Scalar(1, 2) * Scalar(3, -1), Scalar(5, 5))
        self.assertEqual(Scalar(1) / I, Scalar(0, -1))
        self.assertEqual(Scalar(Fraction(1, 2)) + Fraction(1, 2), Scalar(1))

    def test_rendering(self):
        self.assertEqual(str(I), "i")
        self.assertEqual(str(-I), "-i")
        self.assertEqual(str(Scalar(Fraction(1, 2), 3)), "(1/2+3i)")
        self.assertEqual(str(Scalar(-2)), "-2")

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            Scalar(1) / Scalar()


class ComponentTests(SimpleTestCase):
    def test_metric_signature(self):
        self.assertEqual(metric_component(0, 0), Scalar(1))
        self.assertEqual(metric_component(1, 1), Scalar(-1))
        self.assertEqual(metric_component(0, 1), Scalar(0))

    def test_epsilon_orientation(self):
        self.assertEqual(epsilon_component((0, 1, 2, 3)), Scalar(1))
        self.assertEqual(epsilon_component((1, 0, 2, 3)), Scalar(-1))
        self.assertEqual(epsilon_component((0, 0, 2, 3)), Scalar(0))
        self.assertEqual(epsilon_component((3, 2, 1, 0)), Scalar(1))


class ContractionTests(SimpleTestCase):
    def test_metric_trace(self):
        expr = CoefficientExpr.factor(eta(lo("m"), lo("n")), eta(up("m"), up("n")))
        self.assertEqual(expr, 4)

    def test_epsilon_full_contraction(self):
        expr = CoefficientExpr.factor(
            epsilon(up("m"), up("n"), up("r"), up("s")),
            epsilon(lo("m"), lo("n"), lo("r"), lo("s")),
        )
        self.assertEqual(expr, -24)

    def test_epsilon_full_contraction_by_brute_force(self):
        factors = (
            epsilon(up("m"), up("n"), up("r"), up("s")),
            epsilon(lo("m"), lo("n"), lo("r"), lo("s")),
        )
        # __init__ canonicalizes, so sum the raw monomial directly
        raw = CoefficientExpr._from_canonical({factors: Scalar(1)})
        self.assertEqual(raw.evaluate(), Scalar(-24))

    def test_kronecker_substitution(self):
        expr = CoefficientExpr.factor(delta(up("m"), lo("n")), accel(up("n")))
        self.assertEqual(expr, CoefficientExpr.factor(accel(up("m"))))

    def test_concrete_metric_evaluates(self):
        self.assertEqual(CoefficientExpr.factor(eta(lo(2), lo(2))), -1)
        self.assertTrue(CoefficientExpr.factor(eta(lo(0), lo(3))).is_zero())

    def test_repeated_epsilon_index_vanishes(self):
        expr = CoefficientExpr.factor(
            epsilon(lo("m"), lo("n"), lo(2), lo(2)),
            accel(up("m")),
            accel(up("n")),
        )
        self.assertTrue(expr.is_zero())

    def test_bound_names_do_not_matter(self):
        left = CoefficientExpr.factor(eta(lo("m"), lo("n")), accel(up("m")), accel(up("n")))
        right = CoefficientExpr.factor(eta(lo("x"), lo("y")), accel(up("x")), accel(up("y")))
        self.assertEqual(left, right)

    def test_symbolic_and_brute_force_agree(self):
        expr = CoefficientExpr.factor(eta(lo("m"), lo("n")), accel(up("m")), accel(up("n")))
        values = {0: 2, 1: 1, 2: 0, 3: 3}
        # a.a = a_0^2 - a_1^2 - a_2^2 - a_3^2
        self.assertEqual(expr.evaluate(accel_values=values), Scalar(4 - 1 - 0 - 9))

    def test_substitute_acceleration(self):
        expr = CoefficientExpr.accel(1) * 3 + CoefficientExpr.accel(2)
        self.assertEqual(expr.substitute_accel({1: 2, 2: 0}), 6)


class PairingTests(SimpleTestCase):
    def test_index_used_three_times(self):
        with self.assertRaises(IndexPairingError):
            CoefficientExpr.factor(eta(lo("m"), lo("n")), accel(up("m")), accel(up("m")))

    def test_index_paired_with_same_variance(self):
        with self.assertRaises(IndexPairingError) as cm:
            CoefficientExpr.factor(accel(lo("m")), accel(lo("m")))
        self.assertIn("a", str(cm.exception.monomial))


def random_scalar(rng):
    return Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5)))


# Well-paired monomials, each with its own bound names.
MONOMIALS = (
    (eta(lo("m"), lo("n")), accel(up("m")), accel(up("n"))),
    (accel(up("p")), eta(lo("q"), lo("p")), delta(up("q"), lo("r")), accel(up("r"))),
    (epsilon(lo("a"), lo("b"), lo("c"), lo("d")), eta(up("a"), up("b")), accel(up("c")), accel(up("d"))),
    (epsilon(up("e"), up("f"), up("g"), up("h")), epsilon(lo("h"), lo("g"), lo("f"), lo("e"))),
    (delta(up("u"), lo("v")), delta(up("v"), lo("u"))),
    (accel(lo(1)), accel(up("w")), accel(lo("w"))),
    (eta(lo(0), lo(0)), accel(up(2))),
)

ACCEL_VALUES = {0: 3, 1: -1, 2: 2, 3: 5}


class CanonicalizationPropertyTests(SimpleTestCase):
    def random_raw(self, rng):
        picks = rng.sample(MONOMIALS, rng.randint(1, 4))
        return CoefficientExpr._from_canonical({factors: random_scalar(rng) for factors in picks})

    def test_idempotent(self):
        rng = random.Random(41)
        for _ in range(200):
            once = canonicalize(self.random_raw(rng))
            self.assertEqual(canonicalize(once), once)
            self.assertEqual(CoefficientExpr._from_canonical(dict(once.terms())).canonical(), once)

    def test_contraction_matches_component_sum(self):
        rng = random.Random(43)
        for _ in range(100):
            raw = self.random_raw(rng)
            self.assertEqual(
                canonicalize(raw).evaluate(accel_values=ACCEL_VALUES),
                raw.evaluate(accel_values=ACCEL_VALUES),
                str(raw),
            )

    def test_each_monomial_matches_component_sum(self):
        for factors in MONOMIALS:
            raw = CoefficientExpr._from_canonical({factors: Scalar(1)})
            self.assertEqual(
                CoefficientExpr.factor(*factors).evaluate(accel_values=ACCEL_VALUES),
                raw.evaluate(accel_values=ACCEL_VALUES),
                factors,
            )

    def test_partial_epsilon_contraction(self):
        # eps^{mnrs} eps_{mnrt} = -6 delta^s_t
        expr = CoefficientExpr.factor(
            epsilon(up("m"), up("n"), up("r"), up("s")),
            epsilon(lo("m"), lo("n"), lo("r"), lo("t")),
            accel(lo("s")),
            accel(up("t")),
        )
        square = CoefficientExpr.factor(eta(lo("x"), lo("y")), accel(up("x")), accel(up("y")))
        self.assertEqual(expr, square * -6)
        raw = CoefficientExpr._from_canonical(
            {
                (
                    epsilon(up("m"), up("n"), up("r"), up("s")),
                    epsilon(lo("m"), lo("n"), lo("r"), lo("t")),
                    accel(lo("s")),
                    accel(up("t")),
                ): Scalar(1)
            }
        )
        self.assertEqual(raw.evaluate(accel_values=ACCEL_VALUES), Scalar(-6 * (9 - 1 - 4 - 25)))

    def test_double_epsilon_contraction(self):
        # eps^{mnrs} eps_{mnuv} a_r a^u = -2 (a.a delta^s_v - a^s a_v), traced with delta^v_s
        expr = CoefficientExpr.factor(
            epsilon(up("m"), up("n"), up("r"), up("s")),
            epsilon(lo("m"), lo("n"), lo("u"), lo("v")),
            accel(lo("r")),
            accel(up("u")),
            delta(up("v"), lo("s")),
        )
        square = CoefficientExpr.factor(eta(lo("x"), lo("y")), accel(up("x")), accel(up("y")))
        self.assertEqual(expr, square * -6)


class ScalarFieldTests(SimpleTestCase):
    def test_field_laws(self):
        rng = random.Random(47)
        for _ in range(300):
            x, y, z = (random_scalar(rng) for _ in range(3))
            self.assertEqual((x + y) + z, x + (y + z))
            self.assertEqual((x * y) * z, x * (y * z))
            self.assertEqual(x * (y + z), x * y + x * z)
            self.assertEqual(x * y, y * x)
            self.assertEqual(x + (-x), Scalar())
            if x:
                self.assertEqual(x * (Scalar(1) / x), Scalar(1))
                self.assertEqual((y / x) * x, y)

    def test_conjugate(self):
        rng = random.Random(53)
        for _ in range(100):
            x, y = random_scalar(rng), random_scalar(rng)
            self.assertEqual((x * y).conjugate(), x.conjugate() * y.conjugate())
            self.assertTrue((x * x.conjugate()).is_real())
