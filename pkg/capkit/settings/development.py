from .common import *  # noqa

DEBUG = True


# Logging

LOGGING['loggers']['cap']['level'] = os.getenv('CAP_LOG_LEVEL', 'DEBUG')
