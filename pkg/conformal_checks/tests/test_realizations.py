import random
from fractions import Fraction

from django.test import SimpleTestCase

from conformal_checks.algebra import BASIS, AlgebraElement, D, P, default_table, iter_pairs
from conformal_checks.exceptions import ParticleCountError, RepresentationUnsolvable
from conformal_checks.identities import default_catalog
from conformal_checks.operators import DiffOperator
from conformal_checks.realizations import (
    build_one_particle_realization,
    canonical_point_samples,
    check_identity_in_realization,
    default_constants,
    evaluate_at_point,
    one_particle_closure,
    operator_catalog,
    realization,
    realize,
    two_photon_observables,
)
from conformal_checks.tensors import Scalar
from conformal_checks.wordalgebra import NCPolynomial, default_algebra, letters, multiply


def failing(residuals):
    return [f"{r.label}: {r.rendered}" for r in residuals if not r.zero]


class OneParticleTests(SimpleTestCase):
    def test_solved_constants(self):
        self.assertEqual(
            default_constants(),
            {"b": 0, "x1": 0, "alpha": 0, "beta": 0, "gamma": 2},
        )
        self.assertTrue(all(isinstance(v, Fraction) for v in default_constants().values()))

    def test_closure(self):
        residuals = one_particle_closure()
        self.assertEqual(len(residuals), 105)
        self.assertEqual([pair for pair, op in residuals.items() if not op.is_zero()], [])

    def test_wrong_constant_breaks_closure(self):
        constants = dict(default_constants(), gamma=Fraction(3))
        residuals = one_particle_closure(constants)
        self.assertTrue(any(not op.is_zero() for op in residuals.values()))

    def test_corrupted_table_is_unsolvable(self):
        table = default_table().with_override(D, P(1), AlgebraElement.of(P(1), 2))
        with self.assertRaises(RepresentationUnsolvable):
            build_one_particle_realization(table)

    def test_mass_powers_need_two_particles(self):
        for k in (-2, -1, 1, 2):
            with self.subTest(k), self.assertRaises(ParticleCountError):
                realization(1).mpower(k)
        self.assertEqual(realization(1).mpower(0), DiffOperator.constant(realization(1).ring, 1))
        with self.assertRaises(ParticleCountError):
            realize(letters("P0", "M"), 1)


class TwoParticleTests(SimpleTestCase):
    def setUp(self):
        self.real = realization(2)
        self.ring = self.real.ring

    def test_coproduct_closes(self):
        for left, right in iter_pairs():
            self.assertTrue(self.real.pair_residual(left, right).is_zero(), (left, right))

    def test_translations_commute(self):
        for left in BASIS[:4]:
            for right in BASIS[:4]:
                self.assertTrue(self.real.generator(left).normalized_bracket(self.real.generator(right)).is_zero())

    def test_dilatation_on_test_function(self):
        f = self.ring.k(1, 3) * self.ring.k(2, 1) + self.ring.omega(2)
        bracket = self.real.generator(D).normalized_bracket(self.real.generator(P(1)))
        self.assertEqual(bracket.apply(f), self.real.generator(P(1)).apply(f))

    def test_inverse_mass_square(self):
        op = realize(letters("M^-2"), 2)
        self.assertEqual(op, DiffOperator.multiplication(self.ring.sigma_power(-2)))
        self.assertEqual(op, DiffOperator.multiplication(self.ring.s()).scale(self.ring.sigma_power(-4)))

    def test_canonical_commutator(self):
        algebra = default_algebra()
        position = default_catalog().position(0)
        bracket = algebra.nc_bracket(algebra.generator(P(0)), position)
        self.assertEqual(bracket, NCPolynomial.constant(-1))
        op = self.real.generator(P(0)).normalized_bracket(realize(position, 2))
        self.assertEqual(op, DiffOperator.constant(self.ring, -1))

    def test_dilatation_as_position(self):
        catalog = default_catalog()
        difference = catalog.backend.sub(catalog.D(), catalog.dilatation_from_position())
        self.assertTrue(realize(difference, 2).is_zero())
        ops = operator_catalog(2)
        self.assertTrue(ops.backend.sub(ops.D(), ops.dilatation_from_position()).is_zero())

    def test_identities_hold_on_operators(self):
        for check_id in ("eq7.canonical-commutator", "eq9.spin-tensor", "eq5.conformal-mass-odd"):
            with self.subTest(check_id):
                self.assertEqual(failing(check_identity_in_realization(check_id, 2)), [])

    def test_spin_operator_is_nontrivial(self):
        self.assertFalse(operator_catalog(2).spin_tensor(1, 2).is_zero())

    def test_identities_need_two_particles(self):
        with self.assertRaises(ParticleCountError):
            check_identity_in_realization("eq7.dilatation", 1)


class HomomorphismTests(SimpleTestCase):
    def assert_multiplicative(self, n, mass, samples):
        algebra = default_algebra()
        rng = random.Random(60 + n)
        for _ in range(samples):
            p = algebra.random_polynomial(rng, terms=2, length=2, mass=mass)
            q = algebra.random_polynomial(rng, terms=2, length=2, mass=mass)
            self.assertEqual(realize(multiply(p, q), n), realize(p, n) @ realize(q, n), (p, q))

    def test_product_one_particle(self):
        self.assert_multiplicative(1, mass=False, samples=15)

    def test_product_two_particles(self):
        self.assert_multiplicative(2, mass=True, samples=10)

    def test_normal_ordering_preserves_image(self):
        algebra = default_algebra()
        word = letters("M", "C0", "P1")
        self.assertEqual(realize(algebra.normal_form(word), 2), realize(word, 2))


class PointEvaluationTests(SimpleTestCase):
    def test_identity_and_energy(self):
        real = realization(2)
        ring = real.ring
        point = ring.point([(0, 0, 1), (0, 0, -1)])
        self.assertEqual(evaluate_at_point(DiffOperator.constant(ring, 1), ring.k(1, 3), point), Scalar(1))
        self.assertEqual(evaluate_at_point(real.generator(P(0)), ring.one, point), Scalar(2))

    def test_canonical_commutator_at_random_points(self):
        samples = canonical_point_samples(2, 12, seed=3)
        self.assertEqual(len(samples), 12)
        self.assertEqual([s for s in samples if not s.ok], [])

    def test_samples_are_reproducible(self):
        first = canonical_point_samples(2, 4, seed=8)
        second = canonical_point_samples(2, 4, seed=8)
        self.assertEqual([(s.mu, s.nu, s.point) for s in first], [(s.mu, s.nu, s.point) for s in second])

    def test_two_counterpropagating_photons(self):
        values = two_photon_observables()
        self.assertEqual(values["mass_squared"], Scalar(4))
        self.assertEqual(values["mass"], Scalar(2))
        self.assertEqual(values["energy"], values["mass"])
        for j in (1, 2, 3):
            self.assertEqual(values[f"momentum_{j}"], Scalar(0))
