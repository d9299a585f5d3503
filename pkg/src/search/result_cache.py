"""
Result caching for minimum-edge searches.
Searches are deterministic, so a finished outcome for a shape can be served
again until it expires.
"""
import copy
import json
import time
from typing import Any, Dict, Optional, Sequence

import structlog

from src.config.config import config

logger = structlog.get_logger(__name__)

# In-memory cache; one process serves the API
_cache_store: Dict[str, Dict[str, Any]] = {}

CACHE_CONFIG = {
    "max_ttl": 24 * 3600,
}


def get_cache_config() -> Dict[str, Any]:
    """Cache configuration from the service settings"""
    settings = dict(CACHE_CONFIG)
    settings["default_ttl"] = config.service.result_cache_ttl
    settings["max_cache_size"] = config.service.result_cache_max_size
    settings["enable_caching"] = config.service.result_cache_enabled
    return settings


def get_cache_key(sizes: Sequence[int], method: str = "auto", symmetry: bool = True) -> str:
    """
    Cache key for a search request. Class order does not change the minimum,
    but it does change the witness, so sizes are kept as given.
    """
    return f"nu:{method}:{'sym' if symmetry else 'plain'}:{','.join(map(str, sizes))}"


def get_from_cache(cache_key: str) -> Optional[Dict[str, Any]]:
    """
    Retrieve a cached outcome if available and not expired
    """
    settings = get_cache_config()
    if not settings["enable_caching"]:
        return None

    cached_item = _cache_store.get(cache_key)
    if cached_item is None:
        logger.info("cache miss", key=cache_key)
        return None

    if time.time() > cached_item["expires_at"]:
        logger.info("cache expired", key=cache_key)
        del _cache_store[cache_key]
        return None

    cached_item["last_accessed"] = time.time()
    cached_item["hit_count"] += 1
    logger.info("cache hit", key=cache_key, hit_count=cached_item["hit_count"])

    result = copy.deepcopy(cached_item["data"])
    result["cache"] = {
        "hit": True,
        "age_minutes": round((time.time() - cached_item["created_at"]) / 60, 1),
        "expires_in_minutes": round((cached_item["expires_at"] - time.time()) / 60, 1),
        "hit_count": cached_item["hit_count"],
        "nodes_saved": cached_item["nodes_saved"],
    }
    return result


def set_to_cache(cache_key: str, data: Dict[str, Any], ttl: Optional[int] = None) -> bool:
    """
    Store an outcome with TTL. Outcomes cut short by the budget are not cached;
    a later request may have a larger budget.
    """
    settings = get_cache_config()
    if not settings["enable_caching"]:
        return False
    if not data.get("exhaustive", False):
        logger.info("not caching inconclusive outcome", key=cache_key)
        return False

    ttl = min(ttl or settings["default_ttl"], settings["max_ttl"])

    if cache_key not in _cache_store and len(_cache_store) >= settings["max_cache_size"]:
        oldest_key = min(_cache_store, key=lambda k: _cache_store[k]["last_accessed"])
        del _cache_store[oldest_key]
        logger.info("cache limit reached, removed oldest", key=oldest_key)

    now = time.time()
    _cache_store[cache_key] = {
        "data": copy.deepcopy(data),
        "created_at": now,
        "expires_at": now + ttl,
        "last_accessed": now,
        "hit_count": 0,
        "ttl": ttl,
        "nodes_saved": data.get("nodes_explored", 0),
    }
    logger.info("cached outcome", key=cache_key, ttl=ttl)
    return True


def clear_cache(pattern: Optional[str] = None) -> int:
    """
    Clear cache entries matching pattern or all
    """
    if pattern:
        keys_to_remove = [k for k in _cache_store if pattern in k]
        for key in keys_to_remove:
            del _cache_store[key]
        logger.info("cleared cache entries", count=len(keys_to_remove), pattern=pattern)
        return len(keys_to_remove)
    count = len(_cache_store)
    _cache_store.clear()
    logger.info("cleared all cache entries", count=count)
    return count


def get_cache_stats() -> Dict[str, Any]:
    """
    Cache statistics for monitoring
    """
    items = _cache_store.values()
    return {
        "enabled": get_cache_config()["enable_caching"],
        "total_entries": len(_cache_store),
        "total_hits": sum(item["hit_count"] for item in items),
        "nodes_saved": sum(item["nodes_saved"] * item["hit_count"] for item in items),
        "cache_size_bytes": sum(len(json.dumps(item["data"])) for item in items),
        "oldest_entry": min((item["created_at"] for item in items), default=0),
        "newest_entry": max((item["created_at"] for item in items), default=0),
    }


def should_bypass_cache(request_params: Dict[str, Any]) -> bool:
    """
    Check if cache should be bypassed based on request parameters
    """
    if request_params.get("fresh") or request_params.get("no_cache"):
        logger.info("cache bypass requested via parameter")
        return True

    if not get_cache_config()["enable_caching"]:
        logger.info("cache disabled globally")
        return True

    return False
