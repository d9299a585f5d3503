"""
Background search jobs for the HTTP service.

Searches can run for minutes, so the API queues them and a single worker
hands each one to a thread pool while the event loop keeps serving requests.
"""
import asyncio
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Optional

import structlog

from src.config.config import config
from src.hypergraph.core import ClassShape
from src.search.nu_search import min_edges
from src.search.result_cache import get_cache_key, get_from_cache, set_to_cache, should_bypass_cache

logger = structlog.get_logger(__name__)


class JobStatus:
    QUEUED = "queued"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"


def run_search(request_params: Dict[str, Any]) -> Dict[str, Any]:
    """
    Minimum-edge search with result caching

    Flow: cache check -> search -> cache store -> outcome with metadata
    """
    start_time = time.time()
    sizes = tuple(request_params["classes"])
    method = request_params.get("method", "auto")
    symmetry = request_params.get("symmetry", True)
    cache_key = get_cache_key(sizes, method, symmetry)

    if not should_bypass_cache(request_params):
        cached = get_from_cache(cache_key)
        if cached:
            logger.info("served search from cache", key=cache_key, seconds=round(time.time() - start_time, 3))
            return cached

    budget = config.budget.with_overrides(
        max_nodes=request_params.get("budget_nodes"),
        max_seconds=request_params.get("budget_secs"),
        workers=request_params.get("workers"),
    )
    outcome = min_edges(ClassShape(sizes), budget, method=method, symmetry=symmetry)
    result = outcome.to_dict()
    set_to_cache(cache_key, result)
    result["cache"] = {"hit": False}
    logger.info(
        "search completed",
        classes=list(sizes),
        nu=outcome.nu,
        exhaustive=outcome.exhaustive,
        seconds=round(time.time() - start_time, 2),
    )
    return result


class SearchJobService:
    """Job storage, queue and worker for long-running searches"""

    def __init__(
        self,
        runner: Callable[[Dict[str, Any]], Dict[str, Any]] = run_search,
        max_workers: int = 2,
        job_ttl: Optional[float] = None,
    ):
        self.runner = runner
        self.job_ttl = config.service.result_cache_ttl if job_ttl is None else job_ttl
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self.job_storage: Dict[str, Dict[str, Any]] = {}
        self.job_queue: Optional[asyncio.Queue] = None
        self.worker_task: Optional[asyncio.Task] = None

    @property
    def available(self) -> bool:
        return self.worker_task is not None and not self.worker_task.done()

    async def start(self) -> None:
        self.job_queue = asyncio.Queue()
        self.worker_task = asyncio.create_task(self.worker())
        logger.info("search worker started")

    async def stop(self) -> None:
        if self.worker_task:
            self.worker_task.cancel()
            try:
                await self.worker_task
            except asyncio.CancelledError:
                pass
        self.worker_task = None
        logger.info("search worker stopped")

    async def run_now(self, request_params: Dict[str, Any]) -> Dict[str, Any]:
        """Run a search in the thread pool and wait for it"""
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self.executor, self.runner, request_params)

    async def submit(self, request_params: Dict[str, Any], timeout: Optional[float] = None) -> str:
        """
        Queue a search and return its job id. Raises asyncio.TimeoutError when
        the queue does not accept the job in time; the job is then dropped.
        """
        job_id = str(uuid.uuid4())
        now = time.time()
        self.job_storage[job_id] = {
            "id": job_id,
            "status": JobStatus.QUEUED,
            "created_at": now,
            "updated_at": now,
            "request": dict(request_params),
        }
        timeout = config.service.queue_timeout_seconds if timeout is None else timeout
        try:
            await asyncio.wait_for(self.job_queue.put({"job_id": job_id, "request_params": request_params}), timeout=timeout)
        except asyncio.TimeoutError:
            self.job_storage.pop(job_id, None)
            raise
        logger.info("queued search job", job_id=job_id, classes=request_params.get("classes"))
        return job_id

    def status(self, job_id: str) -> Dict[str, Any]:
        """Job status; raises KeyError for an unknown id"""
        job = self.job_storage[job_id]
        response = {
            "jobId": job_id,
            "status": job["status"],
            "createdAt": job["created_at"],
            "updatedAt": job["updated_at"],
        }
        if job["status"] == JobStatus.COMPLETED:
            response["result"] = job["result"]
            response["completedAt"] = job["completed_at"]
        elif job["status"] == JobStatus.FAILED:
            response["error"] = job["error"]
            response["failedAt"] = job["failed_at"]
        elif job["status"] == JobStatus.PROCESSING:
            response["message"] = "Searching..."
        return response

    def purge_finished(self, now: Optional[float] = None) -> int:
        """Drop completed and failed jobs not updated within the job TTL"""
        cutoff = (time.time() if now is None else now) - self.job_ttl
        expired = [
            job_id
            for job_id, job in self.job_storage.items()
            if job["status"] in (JobStatus.COMPLETED, JobStatus.FAILED) and job["updated_at"] < cutoff
        ]
        for job_id in expired:
            del self.job_storage[job_id]
        if expired:
            logger.info("purged finished jobs", count=len(expired), remaining=len(self.job_storage))
        return len(expired)

    async def process_job(self, job_id: str, request_params: Dict[str, Any]) -> None:
        job = self.job_storage[job_id]
        job["status"] = JobStatus.PROCESSING
        job["updated_at"] = time.time()
        try:
            result = await self.run_now(request_params)
            job.update({
                "status": JobStatus.COMPLETED,
                "result": result,
                "completed_at": time.time(),
                "updated_at": time.time(),
            })
            logger.info("search job completed", job_id=job_id)
        except Exception as e:
            job.update({
                "status": JobStatus.FAILED,
                "error": str(e),
                "failed_at": time.time(),
                "updated_at": time.time(),
            })
            logger.error("search job failed", job_id=job_id, error=str(e))

    async def worker(self) -> None:
        """Take jobs from the queue one at a time until cancelled"""
        worker_id = str(uuid.uuid4())[:8]
        log = logger.bind(worker=worker_id)
        while True:
            try:
                job_data = await asyncio.wait_for(self.job_queue.get(), timeout=30.0)
            except asyncio.TimeoutError:
                self.purge_finished()
                continue
            except asyncio.CancelledError:
                log.info("worker cancelled")
                break
            try:
                await self.process_job(**job_data)
            except asyncio.CancelledError:
                log.info("worker cancelled")
                break
            except Exception as e:
                log.error("worker error", error=str(e))
            finally:
                self.job_queue.task_done()
                self.purge_finished()
