import time

from src.search import result_cache


def _outcome(nu=4, exhaustive=True):
    return {"classes": [3, 3], "nu": nu, "exhaustive": exhaustive, "nodes_explored": 120}


def test_key_keeps_class_order():
    assert result_cache.get_cache_key([2, 3]) != result_cache.get_cache_key([3, 2])
    assert result_cache.get_cache_key([3, 3], symmetry=False).startswith("nu:auto:plain:")


def test_store_and_hit():
    key = result_cache.get_cache_key([3, 3])
    assert result_cache.get_from_cache(key) is None
    assert result_cache.set_to_cache(key, _outcome())
    cached = result_cache.get_from_cache(key)
    assert cached["nu"] == 4
    assert cached["cache"]["hit"] is True
    assert cached["cache"]["nodes_saved"] == 120
    stats = result_cache.get_cache_stats()
    assert stats["total_entries"] == 1
    assert stats["total_hits"] == 1


def test_cached_copy_is_independent():
    key = result_cache.get_cache_key([3, 3])
    data = _outcome()
    result_cache.set_to_cache(key, data)
    data["nu"] = 99
    result_cache.get_from_cache(key)["nu"] = 98
    assert result_cache.get_from_cache(key)["nu"] == 4


def test_inconclusive_outcomes_are_not_stored():
    key = result_cache.get_cache_key([3, 3, 3, 3])
    assert not result_cache.set_to_cache(key, _outcome(nu=None, exhaustive=False))
    assert result_cache.get_from_cache(key) is None


def test_expiry(monkeypatch):
    key = result_cache.get_cache_key([3, 3])
    result_cache.set_to_cache(key, _outcome(), ttl=10)
    now = time.time()
    monkeypatch.setattr(result_cache.time, "time", lambda: now + 11)
    assert result_cache.get_from_cache(key) is None


def test_clear_by_pattern():
    result_cache.set_to_cache(result_cache.get_cache_key([3, 3]), _outcome())
    result_cache.set_to_cache(result_cache.get_cache_key([2, 2], method="enum"), _outcome(nu=2))
    assert result_cache.clear_cache("nu:enum") == 1
    assert result_cache.get_cache_stats()["total_entries"] == 1


def test_bypass():
    assert result_cache.should_bypass_cache({"fresh": True})
    assert result_cache.should_bypass_cache({"no_cache": True})
    assert not result_cache.should_bypass_cache({"classes": [3, 3]})
