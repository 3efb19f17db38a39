from django.core.management.base import BaseCommand

from conformal_checks.reports import FORMATS, render_catalog
from conformal_checks.runner import list_checks


class Command(BaseCommand):
    help = "List every check with its equation reference"

    def add_arguments(self, parser):
        parser.add_argument("--format", choices=FORMATS, default="text")

    def handle(self, *args, **options):
        self.stdout.write(render_catalog(list_checks(), options["format"]), ending="")
