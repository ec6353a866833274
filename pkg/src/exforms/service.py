"""HTTP front end.

Stateless JSON-in/JSON-out wrapper over the analysis handlers.  Run with

    uvicorn exforms.service:app

Error contract: malformed expressions or semantically bad specs give 400
with a typed detail; inconclusive sampling and numerical singularities
give 422 with codes "inconclusive" and "singularity".  Body-shape
violations are FastAPI's standard 422 validation response.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import api
from . import schemas as sc
from .errors import InconclusiveZeroTest, InputError, SingularIntegrandError

app = FastAPI(
    title="exforms",
    description="Exterior differential systems: Pfaff topology, residuals, period integrals",
    version="0.1.0",
)


@app.exception_handler(InputError)
async def _input_error(request: Request, exc: InputError):
    detail = sc.ErrorDetail(code="input", message=str(exc))
    return JSONResponse(status_code=400, content={"detail": detail.model_dump()})


@app.exception_handler(InconclusiveZeroTest)
async def _inconclusive(request: Request, exc: InconclusiveZeroTest):
    detail = sc.ErrorDetail(code="inconclusive", message=str(exc))
    return JSONResponse(status_code=422, content={"detail": detail.model_dump()})


@app.exception_handler(SingularIntegrandError)
async def _singular(request: Request, exc: SingularIntegrandError):
    detail = sc.ErrorDetail(code="singularity", message=str(exc))
    return JSONResponse(status_code=422, content={"detail": detail.model_dump()})


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/analyze", response_model=sc.AnalysisReport)
def analyze(spec: sc.FormSpec):
    return api.analyze(spec)


@app.post("/topology", response_model=sc.AnalysisReport)
def topology(spec: sc.FormSpec):
    return api.topology(spec)


@app.post("/circulate", response_model=sc.IntegralReport)
def circulate(spec: sc.CirculationSpec):
    return api.circulation(spec)


@app.post("/link", response_model=sc.IntegralReport)
def link(spec: sc.CurveSetSpec):
    return api.linking(spec)


@app.post("/braid", response_model=sc.IntegralReport)
def braid(spec: sc.CurveSetSpec):
    return api.braid(spec)


@app.post("/physics", response_model=sc.PhysicsReport)
def physics(spec: sc.PhysicsSpec):
    return api.physics(spec)
