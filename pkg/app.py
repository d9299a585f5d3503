import json
import os
import time
from contextlib import asynccontextmanager
from typing import Any, Dict, List, Optional

import asyncio
import structlog
import uvicorn
from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from services.search_jobs import SearchJobService
from src.config.config import config
from src.config.logging_config import configure_logging
from src.geometry.colourful import ColourConfig, depth_system
from src.geometry.realizability import is_realizable_2d
from src.hypergraph.constructions import build
from src.hypergraph.core import ClassShape, isolated_vertices, parity_violation
from src.hypergraph.errors import NotGeneralPositionError, OctaError, ResourceLimitError, SamplingBudgetError
from src.hypergraph.f2_space import count_systems
from src.hypergraph.instance_io import ColourConfigFile, InstanceFile
from src.search.bounds import bound_report
from src.search.result_cache import clear_cache, get_cache_stats

load_dotenv()
configure_logging()
logger = structlog.get_logger(__name__)

jobs = SearchJobService()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Start the search worker on startup, stop it on shutdown"""
    logger.info("octahedral systems API starting", limits=config.get_all_configs()["limits"])
    try:
        await jobs.start()
    except Exception as e:
        logger.warning("search worker failed to start, synchronous endpoints still work", error=str(e))
    yield
    logger.info("octahedral systems API shutting down")
    await jobs.stop()


app = FastAPI(
    title="Octahedral Systems API",
    description="Parity-constrained partite hypergraphs: checks, counts, constructions, bounds and minimum-edge searches",
    version="1.0.0",
    lifespan=lifespan,
)


def get_smart_cors_origins() -> List[str]:
    """Origins from ALLOWED_ORIGINS, else local development"""
    env_origins = os.getenv("ALLOWED_ORIGINS")
    if env_origins:
        return [origin.strip() for origin in env_origins.split(",") if origin.strip()]
    return ["http://localhost:5173", "http://localhost:8000"]


app.add_middleware(
    CORSMiddleware,
    allow_origins=get_smart_cors_origins(),
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


request_stats = {
    "total_requests": 0,
    "successful_requests": 0,
    "failed_requests": 0,
    "concurrent_requests": 0,
    "average_processing_time": 0.0,
}


class NuRequest(BaseModel):
    classes: List[int] = Field(..., min_length=1)
    method: str = "auto"
    symmetry: bool = True
    fresh: bool = False
    budget_nodes: Optional[int] = Field(default=None, gt=0)
    budget_secs: Optional[float] = Field(default=None, gt=0)
    workers: Optional[int] = Field(default=None, gt=0)


class ConstructRequest(BaseModel):
    kind: str
    classes: List[int] = Field(default_factory=list)


def _to_http(e: Exception) -> HTTPException:
    if isinstance(e, (ResourceLimitError, SamplingBudgetError)):
        return HTTPException(status_code=413, detail=str(e))
    if isinstance(e, NotGeneralPositionError):
        return HTTPException(status_code=400, detail={"message": str(e), "selection": json.loads(json.dumps(e.selection, default=str))})
    return HTTPException(status_code=400, detail=str(e))


def _parse_sizes(shape: str) -> ClassShape:
    try:
        return ClassShape(tuple(int(m) for m in shape.split(",") if m.strip()))
    except ValueError as e:
        raise HTTPException(status_code=400, detail=f"invalid class sizes {shape!r}: {e}")


def _record(start: float, ok: bool) -> None:
    if ok:
        request_stats["successful_requests"] += 1
        n = request_stats["successful_requests"]
        elapsed = time.time() - start
        request_stats["average_processing_time"] = (request_stats["average_processing_time"] * (n - 1) + elapsed) / n
    else:
        request_stats["failed_requests"] += 1


@app.post("/check")
async def check_endpoint(instance: InstanceFile) -> Dict[str, Any]:
    """Parity condition and isolated vertices of an instance"""
    try:
        system = instance.to_hypergraph()
        violation = parity_violation(system.shape, system.mask)
    except OctaError as e:
        raise _to_http(e)
    return {
        "octahedral": violation is None,
        "isolated": [list(v) for v in sorted(isolated_vertices(system))],
        "violation": None if violation is None else violation.to_dict(),
    }


@app.get("/count/{shape}")
async def count_endpoint(shape: str) -> Dict[str, Any]:
    sizes = _parse_sizes(shape)
    try:
        result = count_systems(sizes).to_dict()
    except OctaError as e:
        raise _to_http(e)
    result["classes"] = list(sizes.sizes)
    return result


@app.post("/construct")
async def construct_endpoint(request: ConstructRequest) -> Dict[str, Any]:
    try:
        return build(request.kind, request.classes).to_instance()
    except OctaError as e:
        raise _to_http(e)


@app.get("/bounds/{shape}")
async def bounds_endpoint(shape: str) -> Dict[str, Any]:
    sizes = _parse_sizes(shape)
    try:
        return bound_report(sizes).to_dict()
    except OctaError as e:
        raise _to_http(e)


@app.post("/depth")
async def depth_endpoint(cfg: ColourConfigFile) -> Dict[str, Any]:
    """System of colourful simplices containing the origin"""
    try:
        colour_config = ColourConfig.from_file(cfg)
        result = depth_system(colour_config)
    except OctaError as e:
        raise _to_http(e)
    data = result.system.to_instance()
    data["count"] = result.count
    data["hull"] = colour_config.hull_flags()
    return data


@app.post("/realizable2d")
async def realizable_endpoint(instance: InstanceFile, up_to_iso: bool = False) -> Dict[str, Any]:
    try:
        system = instance.to_system()
        loop = asyncio.get_running_loop()
        verdict = await loop.run_in_executor(jobs.executor, lambda: is_realizable_2d(system, up_to_iso=up_to_iso))
    except OctaError as e:
        raise _to_http(e)
    return verdict.to_dict()


@app.post("/nu")
async def nu_endpoint(request: NuRequest) -> JSONResponse:
    """
    Minimum edge count without isolated vertex, run synchronously.
    Finished searches are cached; fresh=true bypasses the cache.
    """
    request_start = time.time()
    request_stats["total_requests"] += 1
    request_stats["concurrent_requests"] += 1
    try:
        result = await jobs.run_now(request.model_dump())
        _record(request_start, True)
        return JSONResponse(status_code=200, content=result)
    except OctaError as e:
        _record(request_start, False)
        raise _to_http(e)
    finally:
        request_stats["concurrent_requests"] -= 1


@app.post("/nu-async")
async def nu_async_endpoint(request: NuRequest, fallback_to_sync: bool = True) -> JSONResponse:
    """Queue a search and return its job id; runs synchronously when the worker is down"""
    if not jobs.available:
        if not fallback_to_sync:
            raise HTTPException(status_code=503, detail="Search worker is not available. Use /nu instead.")
        logger.warning("worker unavailable, searching synchronously")
        response = await nu_endpoint(request)
        return JSONResponse(
            status_code=200,
            content={
                "jobId": None,
                "status": "completed",
                "processingMode": "sync_fallback",
                "result": json.loads(response.body),
            },
        )
    try:
        job_id = await jobs.submit(request.model_dump())
    except asyncio.TimeoutError:
        raise HTTPException(status_code=503, detail="Queue is overloaded, please try again")
    return JSONResponse(
        status_code=202,
        content={
            "jobId": job_id,
            "status": "queued",
            "statusUrl": f"/nu-async/status/{job_id}",
        },
    )


@app.get("/nu-async/status/{job_id}")
async def nu_job_status(job_id: str) -> JSONResponse:
    try:
        return JSONResponse(content=jobs.status(job_id))
    except KeyError:
        raise HTTPException(status_code=404, detail="Job not found")


@app.get("/health")
async def health_check() -> Dict[str, Any]:
    return {
        "status": "healthy",
        "timestamp": time.time(),
        "worker_available": jobs.available,
        "budget": config.get_all_configs()["budget"],
    }


@app.get("/stats")
async def get_stats() -> Dict[str, Any]:
    total = request_stats["total_requests"]
    return {
        "request_stats": request_stats,
        "success_rate": request_stats["successful_requests"] / total * 100 if total else 0,
        "average_processing_time": round(request_stats["average_processing_time"], 2),
        "concurrent_requests": request_stats["concurrent_requests"],
    }


@app.get("/")
async def root():
    return {
        "message": "Octahedral Systems API",
        "version": "1.0.0",
        "status": "running",
        "endpoints": {
            "check": "POST /check",
            "count": "GET /count/{sizes}",
            "construct": "POST /construct",
            "bounds": "GET /bounds/{sizes}",
            "depth": "POST /depth",
            "realizable2d": "POST /realizable2d",
            "nu": "POST /nu",
            "nu_async": "POST /nu-async, GET /nu-async/status/{job_id}",
            "health": "/health",
            "stats": "/stats",
        },
        "caching": {
            "result_cache": f"Enabled ({config.service.result_cache_ttl // 3600} hours TTL)" if config.service.result_cache_enabled else "Disabled",
            "cache_bypass": "Use fresh=true in the request body",
        },
    }


@app.get("/cache/stats")
async def get_cache_stats_endpoint() -> Dict[str, Any]:
    return get_cache_stats()


@app.post("/cache/clear")
async def clear_cache_endpoint(pattern: Optional[str] = None) -> Dict[str, Any]:
    cleared_count = clear_cache(pattern)
    return {
        "message": f"Cleared {cleared_count} cache entries",
        "pattern": pattern or "all",
        "cleared_count": cleared_count,
    }


if __name__ == "__main__":
    uvicorn.run("app:app", host="0.0.0.0", port=8000, reload=False, access_log=True, log_level="info", workers=1)
