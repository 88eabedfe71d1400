from .common import *  # noqa

DEBUG = False


# Batch runs (CI, reproduction of the acceptance suite)

CAP_SUITE_WORKERS = int(os.getenv('CAP_SUITE_WORKERS', str(os.cpu_count() or 1)))

LOGGING['loggers']['cap']['level'] = os.getenv('CAP_LOG_LEVEL', 'WARNING')
