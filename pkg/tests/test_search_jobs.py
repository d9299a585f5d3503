import asyncio

import pytest

from services.search_jobs import JobStatus, SearchJobService, run_search
from src.config.config import config


def test_run_search_caches_exhaustive_outcomes():
    params = {"classes": [2, 3], "workers": 1}
    first = run_search(params)
    assert first["cache"] == {"hit": False}
    assert first["nu"] is not None
    second = run_search(params)
    assert second["cache"]["hit"] is True
    assert run_search({**params, "fresh": True})["cache"]["hit"] is False


def test_run_search_does_not_cache_budget_exhaustion():
    params = {"classes": [3, 3, 3, 3], "method": "search", "budget_nodes": 1, "workers": 1}
    first = run_search(params)
    assert first["exhaustive"] is False
    assert run_search(params)["cache"]["hit"] is False


async def _wait(service, job_id, timeout=10.0):
    loop = asyncio.get_running_loop()
    deadline = loop.time() + timeout
    while loop.time() < deadline:
        status = service.status(job_id)
        if status["status"] in (JobStatus.COMPLETED, JobStatus.FAILED):
            return status
        await asyncio.sleep(0.01)
    raise AssertionError(f"job {job_id} did not finish")


async def test_job_lifecycle():
    service = SearchJobService(runner=lambda params: {"echo": params["classes"]})
    await service.start()
    try:
        assert service.available
        job_id = await service.submit({"classes": [3, 3]})
        status = await _wait(service, job_id)
        assert status["status"] == JobStatus.COMPLETED
        assert status["result"] == {"echo": [3, 3]}
        assert "completedAt" in status
    finally:
        await service.stop()
    assert not service.available


async def test_failed_job_records_error():
    def boom(params):
        raise ValueError("no such shape")

    service = SearchJobService(runner=boom)
    await service.start()
    try:
        status = await _wait(service, await service.submit({"classes": [1]}))
        assert status["status"] == JobStatus.FAILED
        assert status["error"] == "no such shape"
    finally:
        await service.stop()


async def test_run_now_uses_the_pool():
    service = SearchJobService(runner=lambda params: {"nu": 2})
    assert await service.run_now({"classes": [2, 2]}) == {"nu": 2}


async def test_full_queue_drops_the_job():
    service = SearchJobService()
    service.job_queue = asyncio.Queue(maxsize=1)
    await service.job_queue.put({"job_id": "held", "request_params": {}})
    with pytest.raises(asyncio.TimeoutError):
        await service.submit({"classes": [2, 2]}, timeout=0.01)
    assert service.job_storage == {}


def test_unknown_job_id():
    with pytest.raises(KeyError):
        SearchJobService().status("missing")


def test_purge_drops_only_old_finished_jobs():
    service = SearchJobService(job_ttl=60)
    service.job_storage = {
        "old-done": {"status": JobStatus.COMPLETED, "updated_at": 0.0},
        "old-failed": {"status": JobStatus.FAILED, "updated_at": 0.0},
        "old-queued": {"status": JobStatus.QUEUED, "updated_at": 0.0},
        "old-running": {"status": JobStatus.PROCESSING, "updated_at": 0.0},
        "fresh-done": {"status": JobStatus.COMPLETED, "updated_at": 1000.0},
    }
    assert service.purge_finished(now=1030.0) == 2
    assert set(service.job_storage) == {"old-queued", "old-running", "fresh-done"}


def test_job_ttl_defaults_to_result_cache_ttl():
    assert SearchJobService().job_ttl == config.service.result_cache_ttl


async def test_worker_purges_expired_jobs():
    service = SearchJobService(runner=lambda params: {"echo": params["classes"]}, job_ttl=0.05)
    await service.start()
    try:
        first = await service.submit({"classes": [2, 2]})
        await _wait(service, first)
        await asyncio.sleep(0.1)
        second = await service.submit({"classes": [3, 3]})
        assert (await _wait(service, second))["status"] == JobStatus.COMPLETED
        assert first not in service.job_storage
        assert second in service.job_storage
    finally:
        await service.stop()
