import os

from pathlib import Path


BASE_DIR = Path(__file__).resolve().parent.parent.parent


# Application definition

INSTALLED_APPS = [
    'cap',
]

# Scenarios and traces live on disk, nothing is persisted in a database
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

USE_I18N = True

USE_TZ = True


# Numeric policy

CAP_ATOL = float(os.getenv('CAP_ATOL', '1e-9'))

CAP_RTOL = float(os.getenv('CAP_RTOL', '1e-9'))

CAP_DYKSTRA_TOL = float(os.getenv('CAP_DYKSTRA_TOL', '1e-10'))

CAP_DYKSTRA_MAX_ITERS = int(os.getenv('CAP_DYKSTRA_MAX_ITERS', '10000'))

CAP_ORBIT_HORIZON = int(os.getenv('CAP_ORBIT_HORIZON', '10000'))

CAP_ORBIT_BOUND_FACTOR = float(os.getenv('CAP_ORBIT_BOUND_FACTOR', '1e6'))

CAP_DIVERGENCE_FACTOR = float(os.getenv('CAP_DIVERGENCE_FACTOR', '1e8'))

CAP_MAX_ITERS = int(os.getenv('CAP_MAX_ITERS', '10000'))


# Harness

CAP_BUNDLED_DIR = Path(os.getenv('CAP_BUNDLED_DIR', BASE_DIR / 'cap' / 'bundled'))

CAP_SUITE_WORKERS = int(os.getenv('CAP_SUITE_WORKERS', '1'))


# Logging

CAP_LOG_LEVEL = os.getenv('CAP_LOG_LEVEL', 'INFO')

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
        'cap': {
            'handlers': ['console'],
            'level': CAP_LOG_LEVEL,
            'propagate': False,
        },
    },
}
