from django.test import SimpleTestCase

from conformal_checks.identities import (
    REGISTRY,
    all_zero,
    check_double_commutators,
    check_mass_shifts,
    check_pauli_lubanski,
    check_position_commutators,
    check_redshift_law,
    default_catalog,
    run_identity,
)
from conformal_checks.observables import direction
from conformal_checks.wordalgebra import NCPolynomial


def failing(residuals):
    return [f"{r.label}: {r.rendered}" for r in residuals if not r.zero]


class ObservableTests(SimpleTestCase):
    def setUp(self):
        self.cat = default_catalog()
        self.b = self.cat.backend

    def test_canonical_commutator(self):
        self.assertEqual(self.b.bracket(self.cat.P(0), self.cat.position(0)), NCPolynomial.constant(-1))
        self.assertEqual(self.b.bracket(self.cat.P(2), self.cat.position(2)), NCPolynomial.constant(1))
        self.assertTrue(self.b.bracket(self.cat.P(1), self.cat.position(3)).is_zero())

    def test_dilatation_scales_position(self):
        self.assertEqual(self.b.bracket(self.cat.D(), self.cat.position(2)), self.cat.position(2).scale(-1))

    def test_lorentz_rotates_position(self):
        self.assertEqual(self.b.bracket(self.cat.J(0, 1), self.cat.position(1)), self.cat.position(0).scale(-1))

    def test_position_self_bracket(self):
        self.assertTrue(self.b.bracket(self.cat.position(0), self.cat.position(0)).is_zero())

    def test_dilatation_from_position(self):
        self.assertEqual(self.cat.dilatation_from_position(), self.cat.D())

    def test_spin_tensor_is_not_zero(self):
        self.assertFalse(self.cat.spin_tensor(1, 2).is_zero())

    def test_acceleration_bracket_with_constant(self):
        delta = self.cat.accel_generator(direction(3))
        self.assertTrue(self.b.bracket(delta, self.b.constant(5)).is_zero())


class RegisteredIdentityTests(SimpleTestCase):
    def test_catalog_ids(self):
        for check_id in (
            "eq1.mass-definition",
            "eq5.conformal-mass-odd",
            "eq7.canonical-commutator",
            "eq10.spin-reconstruction",
            "eq11.redshift",
            "eq13.covariance",
        ):
            self.assertIn(check_id, REGISTRY)
            self.assertTrue(REGISTRY[check_id].paper_ref.startswith("Eq. ("))

    def test_every_identity_vanishes_in_word_algebra(self):
        catalog = default_catalog()
        for check_id, check in sorted(REGISTRY.items()):
            if "nc" not in check.backends:
                continue
            with self.subTest(check_id):
                residuals = run_identity(check_id, catalog)
                self.assertTrue(residuals)
                self.assertEqual(failing(residuals), [])

    def test_grouped_operations(self):
        for operation in (
            check_mass_shifts,
            check_position_commutators,
            check_pauli_lubanski,
            check_redshift_law,
            check_double_commutators,
        ):
            with self.subTest(operation.__name__):
                self.assertTrue(all_zero(operation()))

    def test_concrete_direction_matches_symbolic(self):
        catalog = default_catalog()
        for nu in range(4):
            self.assertTrue(all_zero(run_identity("eq11.redshift", catalog, direction(nu))))
            self.assertTrue(all_zero(run_identity("eq6.accelerated-mass-shift", catalog, direction(nu))))
