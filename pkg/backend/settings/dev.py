from .base import *

DEBUG = True

# Show step timings from OperationLogger while developing
LOGGING["handlers"]["console"]["level"] = os.environ.get("QMACRO_CONSOLE_LEVEL", "DEBUG")
