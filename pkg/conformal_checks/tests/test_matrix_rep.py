import sympy
from django.test import SimpleTestCase

from conformal_checks.algebra import AlgebraElement, C, D, J, P, default_table
from conformal_checks.exceptions import RepresentationUnsolvable
from conformal_checks.matrix_rep import (
    AMBIENT_METRIC,
    build_matrix_rep,
    commutator,
    default_matrix_rep,
    g_antisymmetry_defects,
    lorentz_matrix,
    pair_residual,
    verify_matrix_rep,
)


class LorentzMatrixTests(SimpleTestCase):
    def test_boost_entries(self):
        m = lorentz_matrix(0, 1)
        nonzero = [(r, c, m[r, c]) for r in range(6) for c in range(6) if m[r, c] != 0]
        # G_00 = +1 and G_11 = -1 leave one entry in each of rows 0 and 1
        self.assertEqual(nonzero, [(0, 1, -1), (1, 0, -1)])

    def test_antisymmetric_under_ambient_metric(self):
        for a in range(6):
            for b in range(a + 1, 6):
                m = lorentz_matrix(a, b)
                self.assertTrue((m.T * AMBIENT_METRIC + AMBIENT_METRIC * m).is_zero_matrix)


class MatrixRepTests(SimpleTestCase):
    def setUp(self):
        self.rep = default_matrix_rep()

    def test_solved_coefficients(self):
        self.assertEqual(
            self.rep.coefficients,
            {
                "alpha": sympy.Integer(1),
                "beta": sympy.Integer(1),
                "gamma": sympy.Integer(-1),
                "delta": sympy.Integer(1),
                "zeta": sympy.Integer(1),
            },
        )

    def test_lorentz_generators_map_to_lorentz_matrices(self):
        self.assertEqual(self.rep[J(0, 1)], lorentz_matrix(0, 1))
        self.assertEqual(self.rep[J(2, 3)], lorentz_matrix(2, 3))

    def test_translation_special_conformal_closure(self):
        left = commutator(self.rep[P(0)], self.rep[C(0)])
        self.assertEqual(left, self.rep.of(AlgebraElement.of(D, -2)))

    def test_every_pair_closes(self):
        residuals = verify_matrix_rep(self.rep)
        self.assertEqual(len(residuals), 105)
        self.assertEqual([r.pair for r in residuals if not r.zero], [])

    def test_named_pairs(self):
        for mu in range(4):
            self.assertTrue(pair_residual(self.rep, D, P(mu)).zero)
            for nu in range(4):
                if mu != nu:
                    self.assertTrue(pair_residual(self.rep, C(mu), C(nu)).zero)

    def test_g_antisymmetry(self):
        self.assertEqual(g_antisymmetry_defects(self.rep), [])

    def test_corrupted_table_has_no_solution(self):
        table = default_table().with_override(D, P(1), AlgebraElement.of(P(1), 2))
        with self.assertRaises(RepresentationUnsolvable):
            build_matrix_rep(table)
