import hashlib
from typing import Optional

from loguru import logger
from redis import Redis

from .config import get_settings

_redis: Optional[Redis] = None
_connected = False


def get_redis() -> Optional[Redis]:
    """Connect on first use; None when FOON_REDIS_URL is unset or the server is down."""
    global _redis, _connected
    if _connected:
        return _redis
    _connected = True
    url = get_settings().redis_url
    if not url:
        return None
    try:
        client = Redis.from_url(url, decode_responses=True)
        client.ping()
        _redis = client
        logger.info("Redis cache connected")
    except Exception as e:
        logger.warning(f"Redis cache unavailable: {e}. Continuing without cache.")
        _redis = None
    return _redis


def cache_key(namespace: str, *parts: str) -> str:
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).hexdigest()
    return f"{namespace}:{digest}"


def set_cache(key: str, value: str, ttl: Optional[int] = None):
    redis = get_redis()
    if redis:
        try:
            redis.set(key, value, ex=ttl or get_settings().cache_ttl)
        except Exception as e:
            logger.warning(f"Cache write failed: {e}")


def get_cache(key: str) -> Optional[str]:
    redis = get_redis()
    if redis:
        try:
            return redis.get(key)
        except Exception as e:
            logger.warning(f"Cache read failed: {e}")
    return None
