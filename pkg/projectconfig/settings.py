from pathlib import Path
from dotenv import dotenv_values

BASE_DIR = Path(__file__).resolve().parent.parent

dotenv_config = dotenv_values(BASE_DIR / ".env")

SECRET_KEY = dotenv_config.get('SECRET_KEY', 'ffjpl-local-only')

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'ffjpl.apps.FfjplConfig',
]

# Nothing is stored; the checker works on files only.
DATABASES = {}

# Feature-model query results. The model of a product line never changes
# while it is checked, so entries do not expire.
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
    },
    'featuremodel': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'ffjpl-featuremodel',
        'TIMEOUT': None,
        'OPTIONS': {
            'MAX_ENTRIES': 100000,
        },
    },
    'nocache': {
        'BACKEND': 'django.core.cache.backends.dummy.DummyCache',
    },
}

FFJ_QUERY_CACHE = dotenv_config.get('FFJ_QUERY_CACHE', 'featuremodel')
FFJ_NO_QUERY_CACHE = dotenv_config.get('FFJ_NO_QUERY_CACHE', 'nocache')

# Step budgets for evaluation (eval) and for the trace check of the oracle.
FFJ_EVAL_FUEL = int(dotenv_config.get('FFJ_EVAL_FUEL', 100000))
FFJ_ORACLE_FUEL = int(dotenv_config.get('FFJ_ORACLE_FUEL', 10000))
FFJ_MAX_VARIANTS = int(dotenv_config.get('FFJ_MAX_VARIANTS', 65536))

FFJ_LOG_LEVEL = dotenv_config.get('FFJ_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'ffjpl': {
            'handlers': ['console'],
            'level': FFJ_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Command messages go through gettext.
LANGUAGE_CODE = 'en'

USE_I18N = True
