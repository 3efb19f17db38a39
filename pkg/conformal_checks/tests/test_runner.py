import asyncio
import json

from django.test import SimpleTestCase

from conformal_checks.algebra import AlgebraElement, C, D, P, default_table
from conformal_checks.catalog import RunOptions
from conformal_checks.exceptions import UnknownCheckError
from conformal_checks.identities import REGISTRY
from conformal_checks.reports import render, render_catalog
from conformal_checks.runner import ERROR, FAIL, PASS, CheckRunner, Report


def corrupted_options():
    """A structure table with the sign of (P0, C0) flipped."""
    table = default_table().with_override(P(0), C(0), AlgebraElement.of(D, 2))
    return RunOptions(table=table)


class CatalogTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.runner = CheckRunner()

    def test_listing_content(self):
        checks = {d.id: d for d in self.runner.get_all_checks()}
        self.assertEqual(checks["eq7.canonical-commutator"].paper_ref, "Eq. (7)")
        self.assertIn("eq4.pair.P0.C0", checks)
        self.assertIn("matrix.pair.P0.C0", checks)
        self.assertIn("realization.pair.n1.D.C3", checks)
        self.assertIn("realization.eq11.redshift", checks)

    def test_listing_size(self):
        checks = self.runner.get_all_checks()
        identities = sum(1 for c in REGISTRY.values() if "nc" in c.backends)
        self.assertGreaterEqual(len(checks), 105 + 455 + identities)
        self.assertEqual(len(checks), len(CheckRunner().get_all_checks()))

    def test_listing_is_sorted(self):
        ids = [d.id for d in self.runner.get_all_checks()]
        self.assertEqual(ids, sorted(ids))

    def test_groups(self):
        self.assertEqual(len(self.runner.resolve(["jacobi"])), 455)
        algebra = self.runner.resolve(["algebra"])
        self.assertEqual(len(algebra), 105 + 455 + 3)
        self.assertEqual(len(self.runner.resolve(["matrix"])), 1 + 105 + 1)

    def test_patterns_and_ids(self):
        ids = [d.id for d in self.runner.resolve(["eq5.*", "eq1.mass-definition"])]
        self.assertEqual(ids[0], "eq1.mass-definition")
        self.assertTrue(all(i.startswith(("eq1.", "eq5.")) for i in ids))
        self.assertIn("eq5.odd-even-consistency", ids)

    def test_unknown_identifier(self):
        with self.assertRaises(UnknownCheckError) as cm:
            self.runner.resolve(["eq4.pair.P0.C0", "eq99.nothing"])
        self.assertEqual(cm.exception.unknown, ("eq99.nothing",))

    def test_catalog_rendering(self):
        text = render_catalog(self.runner.get_all_checks())
        self.assertIn("eq7.canonical-commutator  [Eq. (7)]", text)
        listed = json.loads(render_catalog(self.runner.get_all_checks(), "json"))
        self.assertEqual(len(listed), len(self.runner.get_all_checks()))


class RunTests(SimpleTestCase):
    def test_jacobi_group_passes(self):
        report = CheckRunner().run_sync(["jacobi"], jobs=4)
        self.assertEqual(len(report.checks), 455)
        self.assertEqual(report.totals, {PASS: 455, FAIL: 0, ERROR: 0})
        self.assertEqual(report.exit_code, 0)
        self.assertTrue(all(r.duration_ms >= 0 for r in report.checks))

    def test_algebra_group_passes(self):
        report = CheckRunner().run_sync(["algebra"], jobs=2)
        self.assertEqual(report.failures(), [])

    def test_matrix_group_passes(self):
        report = CheckRunner().run_sync(["matrix"])
        self.assertEqual(report.failures(), [])

    def test_identity_checks_pass(self):
        report = CheckRunner().run_sync(["eq7.*", "eq9.*", "eq11.*"], jobs=2)
        self.assertEqual(report.failures(), [])

    def test_corrupted_table_fails(self):
        report = CheckRunner(corrupted_options()).run_sync(["eq4.pair.P0.C0", "eq3.jacobi.P0.P1.C0", "matrix.solve"])
        by_id = {r.id: r for r in report.checks}
        self.assertEqual(by_id["eq4.pair.P0.C0"].status, FAIL)
        self.assertIn("expected", by_id["eq4.pair.P0.C0"].residual_text)
        self.assertEqual(by_id["eq3.jacobi.P0.P1.C0"].status, FAIL)
        self.assertGreater(by_id["eq3.jacobi.P0.P1.C0"].residual_terms, 0)
        self.assertEqual(by_id["matrix.solve"].status, ERROR)
        self.assertIn("RepresentationUnsolvable", by_id["matrix.solve"].residual_text)
        self.assertEqual(report.exit_code, 1)

    def test_report_ordering_and_determinism(self):
        selection = ["eq4.pair.D.*", "eq4.conformal-weights"]
        first = CheckRunner().run_sync(selection, jobs=3)
        second = CheckRunner().run_sync(selection, jobs=1)
        self.assertEqual([r.id for r in first.checks], sorted(r.id for r in first.checks))
        for fmt in ("json", "markdown", "text"):
            self.assertEqual(render(first, fmt, timestamp=False), render(second, fmt, timestamp=False))

    def test_worker_processes_match_in_order_run(self):
        selection = ["eq4.pair.P0.C0", "eq4.pair.P0.C1", "eq3.jacobi.P0.P1.C0", "realization.pair.n1.D.C3"]
        parallel = CheckRunner(corrupted_options()).run_sync(selection, jobs=2)
        serial = CheckRunner(corrupted_options()).run_sync(selection, jobs=1)
        self.assertEqual(render(parallel, "json", timestamp=False), render(serial, "json", timestamp=False))
        self.assertEqual(parallel.totals[FAIL], 2)

    def test_handle_check(self):
        runner = CheckRunner()
        descriptor = runner.resolve(["eq4.pair.P0.C0"])[0]
        result = asyncio.run(runner.handle_check(descriptor))
        self.assertEqual(result.status, PASS)
        self.assertEqual(result.paper_ref, "Eq. (4)")


class ReportTests(SimpleTestCase):
    def test_json_fields(self):
        report = CheckRunner(corrupted_options()).run_sync(["eq4.pair.P0.C0", "eq4.pair.P0.C1"])
        data = json.loads(render(report, "json"))
        self.assertEqual(set(data), {"version", "conventions", "generated_at", "checks", "totals"})
        self.assertEqual(data["conventions"]["signature"], "(+,-,-,-)")
        self.assertEqual(data["totals"], {"pass": 1, "fail": 1, "error": 0})
        failed = data["checks"][0]
        self.assertEqual(failed["id"], "eq4.pair.P0.C0")
        self.assertIn("residual_text", failed)
        self.assertIn("duration_ms", failed)
        self.assertNotIn("residual_text", data["checks"][1])

    def test_no_timestamp_drops_volatile_fields(self):
        report = Report([], generated_at="2026-01-01T00:00:00+00:00")
        data = json.loads(render(report, "json", timestamp=False))
        self.assertNotIn("generated_at", data)
        self.assertEqual(data["totals"], {"pass": 0, "fail": 0, "error": 0})
        self.assertEqual(report.exit_code, 0)
