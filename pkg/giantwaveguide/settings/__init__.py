"""
Django settings for the giantwaveguide project.

The project has no web surface and no database: Django provides the app
registry, the management commands, form validation of experiment documents,
the template engine used for SVG heatmaps and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import math
import os


# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


DEBUG = True

if DEBUG:
    from dotenv import load_dotenv
    load_dotenv()

# Only used by Django internals (signing), nothing is served
SECRET_KEY = "giantwaveguide-offline-simulation-key"


ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'layouts',
    'coefficients',
    'dynamics',
    'experiments',
    'reports',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
        },
    },
]


# No database: every result is a pure function of the experiment document
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
LOG_LEVEL = os.getenv("WAVEGUIDE_LOG_LEVEL", "WARNING")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in INSTALLED_APPS
    },
}


# Simulation defaults, times in units of 1/gamma_total
SIMULATION = {
    'GAMMA_TOTAL': 1.0,
    'CHI': 0.0,
    'INITIAL': "EG",
    'TIME_GRID': (0.0, 50.0, 2001),
    'PHI_GRID': (0.0, 2 * math.pi, 2001),
    'STEADY_WINDOW': 10.0,
    'STEADY_TOL': 1e-3,
    'FIND_MAX_HORIZON': 50.0,
    'FIND_MAX_PHI_POINTS': 2001,
    'FIND_MAX_T_POINTS': 4001,
    'RK4_DT': 1e-3,
    'SPECIAL_PHASE_POINTS': 100000,
    'WORKERS': int(os.getenv("WAVEGUIDE_WORKERS", "1")),
}
