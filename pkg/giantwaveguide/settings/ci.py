from . import *

LOG_LEVEL = "ERROR"

for _logger in LOGGING['loggers'].values():
    _logger['level'] = LOG_LEVEL

SIMULATION = dict(SIMULATION, WORKERS=1)
