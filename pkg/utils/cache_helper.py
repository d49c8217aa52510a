import logging
import time

from django.conf import settings
from django.core.cache import cache

logger = logging.getLogger(__name__)

KEY_ROOT = "qmacro"
CACHE_TTL = getattr(settings, "CACHE_TTL", None)  # None: keep until cleared


class GlobalCache:
    """Process-wide memo for spaces, kernel stacks and tomography frames.

    Keys are ``qmacro:<family>:<part>:...``; only the public cache API is used.
    """

    @staticmethod
    def key(family: str, *parts) -> str:
        return ":".join([KEY_ROOT, family, *(str(p) for p in parts)])

    @staticmethod
    def get(key):
        return cache.get(key)

    @staticmethod
    def set(key, value, timeout=CACHE_TTL):
        cache.set(key, value, timeout)

    @staticmethod
    def get_or_compute(key, factory, timeout=CACHE_TTL):
        """Return the cached value, building and storing it on a miss.

        Concurrent misses both build; the values are identical so the last write wins.
        """
        value = cache.get(key)
        if value is not None:
            return value
        began = time.perf_counter()
        value = factory()
        cache.set(key, value, timeout)
        logger.debug("cache fill %s in %.3fs", key, time.perf_counter() - began)
        return value
