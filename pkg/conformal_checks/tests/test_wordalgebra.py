import random
from unittest import mock

from django.test import SimpleTestCase

from conformal_checks.algebra import BASIS, C, D, P, default_table
from conformal_checks.exceptions import RewriteBudgetExceeded, RewriteDepthExceeded
from conformal_checks.tensors import I, Scalar
from conformal_checks.wordalgebra import (
    MPower,
    NCPolynomial,
    WordAlgebra,
    is_normal,
    letters,
    word_weight,
)


class NormalFormTests(SimpleTestCase):
    def setUp(self):
        self.algebra = WordAlgebra()

    def nf(self, p):
        return self.algebra.normal_form(p)

    def test_reorder_step(self):
        expected = letters("P0", "C0") + letters("D").scale(2 * I)
        self.assertEqual(self.nf(letters("C0", "P0")), expected)

    def test_ordered_word_is_fixed(self):
        self.assertEqual(self.nf(letters("P0", "C0")), letters("P0", "C0"))
        self.assertTrue(is_normal(tuple(letters("D", "J01", "P2", "C3", "M^-1").words()[0])))

    def test_unit(self):
        p = letters("J12", "C1") + letters("P3").scale(5)
        self.assertEqual(self.algebra.multiply(self.algebra.scalar(1), p), self.nf(p))

    def test_mass_powers_merge(self):
        self.assertEqual(self.nf(letters("M", "M^-1")), NCPolynomial.constant(1))

    def test_inverse_mass_square_cancels_momentum_square(self):
        square = NCPolynomial()
        for rho, sign in enumerate((1, -1, -1, -1)):
            square = square + letters(f"P{rho}", f"P{rho}").scale(sign)
        product = self.algebra.multiply(self.algebra.mpower(-2), square)
        self.assertEqual(product, NCPolynomial.constant(1))

    def test_mass_square_expands(self):
        expected = NCPolynomial()
        for rho, sign in enumerate((1, -1, -1, -1)):
            expected = expected + letters(f"P{rho}", f"P{rho}").scale(sign)
        self.assertEqual(self.algebra.mpower(2), expected)
        self.assertEqual(self.algebra.multiply(self.algebra.mpower(1), self.algebra.mpower(1)), expected)

    def test_idempotent(self):
        rng = random.Random(7)
        for _ in range(1000):
            p = self.algebra.random_polynomial(rng)
            once = self.nf(p)
            self.assertEqual(self.nf(once), once)
            for word in once.words():
                self.assertTrue(is_normal(word), word)

    def test_budget(self):
        algebra = WordAlgebra(step_budget=3)
        with self.assertRaises(RewriteBudgetExceeded) as cm:
            algebra.normal_form(letters("C0", "C1", "P0", "P1", "D", "J23"))
        self.assertEqual(cm.exception.budget, 3)

    def test_mass_letters_are_rightmost(self):
        self.assertEqual(self.nf(letters("C0", "M")), letters("C0", "M"))
        self.assertFalse(is_normal(tuple(letters("M", "C0").words()[0])))
        # M C0 = C0 M - i (C0, M)
        expected = letters("C0", "M") + self.algebra.conformal_mass_shift(0).scale(-I)
        self.assertEqual(self.nf(letters("M", "C0")), expected)

    def test_normal_words_end_in_mass(self):
        rng = random.Random(17)
        for _ in range(200):
            for word in self.nf(self.algebra.random_polynomial(rng)).words():
                masses = [i for i, letter in enumerate(word) if isinstance(letter, MPower)]
                self.assertLessEqual(len(masses), 1, word)
                if masses:
                    self.assertEqual(masses[0], len(word) - 1, word)

    def test_mass_square_passes_conformal_generator(self):
        a = self.algebra
        for mu in range(4):
            c = a.generator(C(mu))
            self.assertEqual(a.multiply(a.mpower(-2), a.multiply(a.mpower(2), c)), c, mu)
            self.assertEqual(a.multiply(a.multiply(c, a.mpower(-1)), a.mpower(1)), c, mu)

    def test_memo_is_capped(self):
        algebra = WordAlgebra(memo_limit=5)
        algebra.normal_form(letters("C0", "C1", "P0", "P1", "D", "J23"))
        self.assertGreater(len(algebra._memo), 5)
        algebra.normal_form(letters("P0"))
        self.assertEqual(len(algebra._memo), 1)

    def test_recursion_depth_has_its_own_error(self):
        algebra = WordAlgebra()
        with mock.patch.object(WordAlgebra, "_nf_word", side_effect=RecursionError):
            with self.assertRaises(RewriteDepthExceeded) as cm:
                algebra.normal_form(letters("C0", "P0"))
        self.assertIn("deeper than", str(cm.exception))
        self.assertIsInstance(cm.exception, RewriteBudgetExceeded)


class ConfluenceTests(SimpleTestCase):
    def test_random_redex_order_agrees(self):
        algebra = WordAlgebra()
        rng = random.Random(2024)
        for _ in range(1000):
            p = algebra.random_polynomial(rng, terms=2, length=3)
            self.assertEqual(algebra.normal_form(p, random.Random(rng.random())), algebra.normal_form(p), p)

    def test_associative(self):
        algebra = WordAlgebra()
        rng = random.Random(11)
        for _ in range(40):
            p, q, r = (algebra.random_polynomial(rng, terms=2, length=2) for _ in range(3))
            left = algebra.multiply(algebra.multiply(p, q), r)
            right = algebra.multiply(p, algebra.multiply(q, r))
            self.assertEqual(left, right)


class ProductTests(SimpleTestCase):
    def setUp(self):
        self.algebra = WordAlgebra()

    def test_sym_product(self):
        a = self.algebra
        p0, c0, p1 = a.generator(P(0)), a.generator(C(0)), a.generator(P(1))
        self.assertEqual(a.sym_product(p0, c0), letters("P0", "C0") + letters("D").scale(I))
        self.assertEqual(a.sym_product(p0, p1), letters("P0", "P1"))
        self.assertEqual(a.sym_product(c0, c0), a.power(c0, 2))

    def test_bracket_examples(self):
        a = self.algebra
        self.assertEqual(a.nc_bracket(a.generator(D), a.generator(P(1))), letters("P1"))
        self.assertTrue(a.nc_bracket(a.generator(P(0)), a.mpower(2)).is_zero())
        self.assertEqual(a.nc_bracket(a.generator(D), a.mpower(-2)), a.mpower(-2).scale(-2))
        self.assertEqual(a.nc_bracket(a.generator(D), a.mpower(1)), a.mpower(1))

    def test_bracket_matches_table_on_generators(self):
        a = self.algebra
        table = default_table()
        for left in BASIS:
            for right in BASIS:
                self.assertEqual(
                    a.nc_bracket(a.generator(left), a.generator(right)),
                    a.element(table(left, right)),
                    (left, right),
                )

    def test_bracket_with_constant(self):
        a = self.algebra
        self.assertTrue(a.nc_bracket(a.generator(C(2)), a.scalar(Scalar(3, 1))).is_zero())

    def test_leibniz(self):
        a = self.algebra
        rng = random.Random(5)
        for _ in range(30):
            p, q, r = (a.random_polynomial(rng, terms=2, length=2) for _ in range(3))
            left = a.nc_bracket(p, a.multiply(q, r))
            right = a.multiply(a.nc_bracket(p, q), r) + a.multiply(q, a.nc_bracket(p, r))
            self.assertEqual(left, right)

    def test_jacobi_on_polynomials(self):
        a = self.algebra
        rng = random.Random(9)
        for _ in range(15):
            p, q, r = (a.random_polynomial(rng, terms=2, length=2) for _ in range(3))
            residual = (
                a.nc_bracket(a.nc_bracket(p, q), r)
                - a.nc_bracket(p, a.nc_bracket(q, r))
                + a.nc_bracket(q, a.nc_bracket(p, r))
            )
            self.assertTrue(residual.is_zero(), residual)

    def test_grading_preserved(self):
        a = self.algebra
        rng = random.Random(3)
        for _ in range(100):
            word = tuple(rng.choice(list(BASIS) + [MPower(-1), MPower(1)]) for _ in range(3))
            for normal in a.normal_form(NCPolynomial({word: 1})).words():
                self.assertEqual(word_weight(normal), word_weight(word), word)

    def test_dilatation_bracket_is_weight(self):
        a = self.algebra
        d = a.generator(D)
        rng = random.Random(31)
        alphabet = list(BASIS) + [MPower(k) for k in (-2, -1, 1, 2)]
        for _ in range(200):
            word = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 4)))
            monomial = NCPolynomial({word: 1})
            expected = a.normal_form(monomial).scale(word_weight(word))
            self.assertEqual(a.nc_bracket(d, monomial), expected, word)

    def test_conformal_mass_shift(self):
        a = self.algebra
        for mu in range(4):
            self.assertEqual(a.nc_bracket(a.generator(C(mu)), a.mpower(1)), a.conformal_mass_shift(mu))

    def test_mass_inverse_is_inverse(self):
        a = self.algebra
        self.assertEqual(a.multiply(a.mpower(-1), a.mpower(2)), a.mpower(1))
        self.assertEqual(a.multiply(a.mpower(2), a.mpower(-2)), a.scalar(1))
