from django.apps import AppConfig


class ConformalChecksConfig(AppConfig):
    name = "conformal_checks"
    default_auto_field = "django.db.models.BigAutoField"
