from pathlib import Path
import os
from dotenv import load_dotenv

# Load env variables
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent.parent


def env_bool(name, default):
    return os.environ.get(name, str(default)).strip().lower() in ("1", "true", "yes", "on")


# Management commands never sign anything; the key only satisfies Django's checks
SECRET_KEY = os.environ.get("SECRET_KEY", "qmacro-local-only")

ALLOWED_HOSTS = []

# Applications
DEFAULT_APPS = []

CUSTOM_APPS = [
    "apps.qmacro",
]

THIRD_PARTY_APPS = []

INSTALLED_APPS = DEFAULT_APPS + CUSTOM_APPS + THIRD_PARTY_APPS

# No models: the dummy backend is enough
DATABASES = {}

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "qmacro",
        "TIMEOUT": None,
        "OPTIONS": {
            "MAX_ENTRIES": int(os.environ.get("QMACRO_CACHE_ENTRIES", 100_000)),
        },
    }
}

# Cache TTL (Time To Live) in seconds; None keeps entries until cleared
CACHE_TTL = None

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True


# ===== QMACRO =====
# d^N size guard for every dense construction
QMACRO_MAX_DIM = int(os.environ.get("QMACRO_MAX_DIM", 4096))
# Upper bound on measurement-space classes built by orbit enumeration
QMACRO_MAX_CLASSES = int(os.environ.get("QMACRO_MAX_CLASSES", 2_000_000))
QMACRO_TOLERANCE = float(os.environ.get("QMACRO_TOLERANCE", 1e-10))
QMACRO_FIDUCIAL = os.environ.get("QMACRO_FIDUCIAL") or None
QMACRO_OUTPUT_DIR = os.environ.get("QMACRO_OUTPUT_DIR", str(BASE_DIR / "output"))
QMACRO_WORKERS = int(os.environ.get("QMACRO_WORKERS", 1))
QMACRO_DEFAULT_SEED = int(os.environ.get("QMACRO_DEFAULT_SEED", 0))
QMACRO_ENSEMBLE_SIZE = int(os.environ.get("QMACRO_ENSEMBLE_SIZE", 200))


# Celery Configuration
CELERY_BROKER_URL = os.environ.get("CELERY_BROKER_URL", "memory://")
CELERY_RESULT_BACKEND = os.environ.get("CELERY_RESULT_BACKEND", "cache+memory://")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 60 * 60  # 1 hour hard limit
CELERY_TASK_SOFT_TIME_LIMIT = 55 * 60
# In-process execution unless a broker is configured and this is switched off
CELERY_TASK_ALWAYS_EAGER = env_bool("CELERY_TASK_ALWAYS_EAGER", True)
CELERY_TASK_EAGER_PROPAGATES = True


# Log directory
LOG_DIR = os.environ.get("LOG_DIR", "logs")
os.makedirs(LOG_DIR, exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,

    # ===== FORMATTERS =====
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d}\n{message}',
            'style': '{',
        },
        'structured': {
            'format': '[{asctime}] [{levelname}] {name}: {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname}: {message}',
            'style': '{',
        },
    },

    # ===== HANDLERS =====
    'handlers': {
        'console': {
            'level': os.environ.get("QMACRO_CONSOLE_LEVEL", "INFO"),
            'class': 'logging.StreamHandler',
            'formatter': 'structured',
        },
        'file': {
            'level': 'ERROR',  # Only write errors and tracebacks to file
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOG_DIR, 'app.log'),
            'formatter': 'verbose',
            'delay': True,
        },
    },

    # ===== ROOT LOGGER =====
    'root': {
        'handlers': ['console', 'file'],
        'level': 'WARNING',
    },

    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
            'propagate': False,
        },

        # Silence verbose Celery task registration logs
        'celery.app.utils': {
            'level': 'WARNING',
            'propagate': False,
        },
        'celery.utils.functional': {
            'level': 'WARNING',
            'propagate': False,
        },

        # Project loggers
        'apps': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'utils': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'backend': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}
