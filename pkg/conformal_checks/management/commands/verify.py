import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import transaction

from conformal_checks.catalog import RunOptions
from conformal_checks.exceptions import UnknownCheckError
from conformal_checks.models import CheckOutcome, VerificationRun
from conformal_checks.reports import FORMATS, render
from conformal_checks.runner import CheckRunner


logger = logging.getLogger(__name__)

CONFIG_KEYS = ("particles", "seed", "jobs", "format", "point_samples", "step_budget", "no_timestamp")


class Command(BaseCommand):
    help = "Run conformal-algebra checks: all, a group (algebra, identities, matrix, realization, jacobi), ids or globs"

    def add_arguments(self, parser):
        parser.add_argument("selection", nargs="*", help="Groups, check identifiers or glob patterns")
        parser.add_argument("--particles", type=int, help="Particle count of the multi-particle realization")
        parser.add_argument("--seed", type=int, help="Seed for randomized point evaluations")
        parser.add_argument("--jobs", type=int, help="Checks run concurrently")
        parser.add_argument("--point-samples", type=int, help="Random momentum points for the point-evaluation check")
        parser.add_argument("--step-budget", type=int, help="Rewrite steps allowed per normal-ordering call")
        parser.add_argument("--format", choices=FORMATS, help="Report format")
        parser.add_argument("--out", help="Write the report to this file instead of stdout")
        parser.add_argument("--no-timestamp", action="store_true", default=None, help="Omit timestamp and durations")
        parser.add_argument("--config", help="JSON file with the same keys as the flags")
        parser.add_argument("--record", action="store_true", help="Store the run in the database")

    def _load_config(self, path):
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as e:
            raise CommandError(f"Cannot read config file {path}: {e}", returncode=2)
        if not isinstance(data, dict):
            raise CommandError(f"Config file {path} must hold a JSON object", returncode=2)
        unknown = sorted(set(data) - set(CONFIG_KEYS))
        if unknown:
            raise CommandError(f"Unknown config keys: {', '.join(unknown)}", returncode=2)
        return data

    def _resolve_options(self, options):
        merged = dict(settings.CONFORMAL_CHECKS)
        merged["no_timestamp"] = False
        if options.get("config"):
            merged.update(self._load_config(options["config"]))
        for key in CONFIG_KEYS:
            if options.get(key) is not None:
                merged[key] = options[key]
        if merged["format"] not in FORMATS:
            raise CommandError(f"Unknown report format {merged['format']}", returncode=2)
        for key, floor in (("particles", 1), ("jobs", 1), ("point_samples", 0), ("step_budget", 1)):
            if merged[key] < floor:
                option = "--" + key.replace("_", "-")
                raise CommandError(f"{option} must be at least {floor}, got {merged[key]}", returncode=2)
        return merged

    def handle(self, *args, **options):
        merged = self._resolve_options(options)
        run_options = RunOptions(
            particles=merged["particles"],
            seed=merged["seed"],
            point_samples=merged["point_samples"],
            step_budget=merged["step_budget"],
        )
        runner = CheckRunner(run_options)
        selection = options["selection"] or ["all"]
        try:
            runner.resolve(selection)
        except UnknownCheckError as e:
            raise CommandError(str(e), returncode=2)

        report = runner.run_sync(selection, jobs=merged["jobs"])
        text = render(report, merged["format"], timestamp=not merged["no_timestamp"])
        if options.get("out"):
            Path(options["out"]).write_text(text)
        else:
            self.stdout.write(text, ending="")

        if options.get("record"):
            self._record(report, selection, run_options)

        if report.exit_code:
            totals = report.totals
            raise CommandError(f"{totals['fail']} checks failed, {totals['error']} errored", returncode=1)

    @transaction.atomic
    def _record(self, report, selection, run_options):
        run = VerificationRun.objects.create(
            version=report.version,
            selection=list(selection),
            seed=run_options.seed,
            particles=run_options.particles,
            totals=report.totals,
        )
        CheckOutcome.objects.bulk_create(
            CheckOutcome(
                run=run,
                check_id=result.id,
                paper_ref=result.paper_ref,
                status=result.status,
                residual_terms=result.residual_terms,
                residual_text=result.residual_text,
                duration_ms=result.duration_ms,
            )
            for result in report.checks
        )
        logger.info(f"Recorded run {run.pk} with {len(report.checks)} outcomes")
