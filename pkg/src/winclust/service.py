"""HTTP facade over the design calculator and the generative models.

Endpoints (JSON request/response):

    POST /power       power at a given M for a design-inputs document
    POST /samplesize  required clusters for a design-inputs document
    POST /contour     required-M matrix over (nbar, cv) grids
    POST /calibrate   design inputs from a generative spec; large budgets
                      run as an async job polled at GET /jobs/{id}
    GET  /health      liveness

Schema violations return 400 with field-level messages; infeasible designs
return 422 with the diagnostic. Responses are pure functions of the request
body (plus the seed for /calibrate); the in-memory job store is the only
state and entries expire after a TTL.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import io as wio
from .design import (
    InfeasibleDesignError,
    contour_matrix,
    describe,
    required_clusters,
)
from .generative import estimate_design_inputs

ASYNC_BUDGET_THRESHOLD = 50_000


class DesignDoc(BaseModel):
    estimand: str
    delta: float
    pi_tie: float
    q: float = 0.5
    nbar: float
    cv: float = 0.0
    icc: float
    composite_probs: Optional[dict[str, float]] = None
    alpha: float = 0.05
    target_power: float = 0.8
    test: str = "z"
    sided: str = "two"
    wd: Optional[float] = None
    contiguous: bool = False


class PowerRequest(BaseModel):
    inputs: DesignDoc
    M: int = Field(ge=2)


class SampleSizeRequest(BaseModel):
    inputs: DesignDoc


class ContourRequest(BaseModel):
    inputs: DesignDoc
    nbar_grid: list[float] = Field(min_length=1, max_length=200)
    cv_grid: list[float] = Field(min_length=1, max_length=200)


class CalibrateRequest(BaseModel):
    spec: dict[str, Any]
    budget: int = Field(default=20_000, ge=1_000, le=2_000_000)
    seed: Optional[int] = None


class _JobStore:
    def __init__(self, ttl_seconds: float = 3600.0):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}

    def create(self) -> str:
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "pending", "created": time.time()}
        return job_id

    def finish(self, job_id: str, result=None, error=None) -> None:
        with self._lock:
            if job_id in self._jobs:
                self._jobs[job_id].update(
                    status="error" if error else "done",
                    result=result,
                    error=error,
                )

    def get(self, job_id: str):
        self._expire()
        with self._lock:
            return self._jobs.get(job_id)

    def _expire(self) -> None:
        cutoff = time.time() - self.ttl
        with self._lock:
            stale = [k for k, v in self._jobs.items() if v["created"] < cutoff]
            for k in stale:
                del self._jobs[k]


def _parse_inputs(doc: DesignDoc):
    return wio.design_inputs_from_dict(doc.model_dump(exclude_none=True))


def create_app(job_ttl_seconds: float = 3600.0) -> FastAPI:
    app = FastAPI(title="winclust planning service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    jobs = _JobStore(job_ttl_seconds)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "error": "schema violation",
                "fields": [
                    {"loc": ".".join(str(p) for p in e["loc"]), "message": e["msg"]}
                    for e in exc.errors()
                ],
            },
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        if isinstance(exc, InfeasibleDesignError):
            return JSONResponse(
                status_code=422,
                content={"error": "infeasible design", "detail": str(exc)},
            )
        return JSONResponse(
            status_code=400, content={"error": "invalid inputs", "detail": str(exc)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/power")
    def power_endpoint(req: PowerRequest):
        inputs = _parse_inputs(req.inputs)
        result = describe(inputs, req.M)
        return wio.design_result_doc(inputs, result) | {"M": req.M}

    @app.post("/samplesize")
    def samplesize_endpoint(req: SampleSizeRequest):
        inputs = _parse_inputs(req.inputs)
        result = required_clusters(inputs)
        return wio.design_result_doc(inputs, result)

    @app.post("/contour")
    def contour_endpoint(req: ContourRequest):
        inputs = _parse_inputs(req.inputs)
        matrix = contour_matrix(inputs, req.nbar_grid, req.cv_grid)
        return {
            "nbar_grid": req.nbar_grid,
            "cv_grid": req.cv_grid,
            # infeasible cells are explicit nulls, never omitted
            "required_M": matrix,
        }

    def _run_calibration(req: CalibrateRequest) -> dict:
        spec = wio.spec_from_dict(req.spec)
        est = estimate_design_inputs(spec, B=req.budget, seed=req.seed)
        return wio.estimate_doc(est)

    @app.post("/calibrate")
    def calibrate_endpoint(req: CalibrateRequest):
        if req.budget <= ASYNC_BUDGET_THRESHOLD:
            return {"status": "done", "result": _run_calibration(req)}
        job_id = jobs.create()

        def work():
            try:
                jobs.finish(job_id, result=_run_calibration(req))
            except Exception as exc:  # surfaced through the job record
                jobs.finish(job_id, error=str(exc))

        threading.Thread(target=work, daemon=True).start()
        return {"status": "pending", "job_id": job_id, "poll": f"/jobs/{job_id}"}

    @app.get("/jobs/{job_id}")
    def job_endpoint(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return JSONResponse(
                status_code=404, content={"error": "unknown or expired job"}
            )
        return {k: v for k, v in job.items() if k != "created"}

    return app
