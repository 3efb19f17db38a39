"""
Django settings for conformal_project project.

The project has no web surface: it hosts the conformal_checks app, its
management commands and the sqlite store for recorded runs.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/6.0/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "django-insecure-conformal-checks-local-only")

DEBUG = os.getenv("DJANGO_DEBUG", "0") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "conformal_checks",
]


# Database
# https://docs.djangoproject.com/en/6.0/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Verification defaults; the verify command overlays a --config file and flags
CONFORMAL_CHECKS = {
    "particles": int(os.getenv("CONFORMAL_PARTICLES", "2")),
    "seed": int(os.getenv("CONFORMAL_SEED", "0")),
    "jobs": int(os.getenv("CONFORMAL_JOBS", "1")),
    "step_budget": int(os.getenv("CONFORMAL_REWRITE_STEP_BUDGET", "200000")),
    "point_samples": int(os.getenv("CONFORMAL_POINT_SAMPLES", "100")),
    "format": os.getenv("CONFORMAL_REPORT_FORMAT", "text"),
}


# Logging
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "{levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "conformal_checks": {
            "handlers": ["console"],
            "level": os.getenv("CONFORMAL_LOG_LEVEL", "WARNING"),
        },
    },
}
