"""
Django settings for the gapvector project.

The project has no web surface: it hosts the ``gaps`` app, whose management
commands (compute, verify, sweep) are the command-line interface, and a small
SQLite archive of recorded runs.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-gapvector-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Gap vector computation defaults (command flags override these)
GAPVEC_SEED = int(os.getenv('GAPVEC_SEED', '0'))
GAPVEC_MODE = os.getenv('GAPVEC_MODE', 'fp')
GAPVEC_PRIME_INDEX = int(os.getenv('GAPVEC_PRIME_INDEX', '0'))
GAPVEC_TRIALS = int(os.getenv('GAPVEC_TRIALS', '3'))
GAPVEC_MARGIN = int(os.getenv('GAPVEC_MARGIN', '25'))
GAPVEC_WORKERS = int(os.getenv('GAPVEC_WORKERS', '1'))
GAPVEC_LOG_LEVEL = os.getenv('GAPVEC_LOG_LEVEL', 'WARNING')


# Application definition

INSTALLED_APPS = [
    'gaps',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Logging: diagnostics go to stderr so report output on stdout stays clean.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'gaps': {
            'handlers': ['console'],
            'level': GAPVEC_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
