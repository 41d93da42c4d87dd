"""FastAPI service wrapping the diagnostics engines.

One POST endpoint per command; request bodies reject unknown keys. Errors come
back as structured JSON with a ``kind`` so thin clients can map them onto exit
codes: ``validation`` for bad inputs, ``numerical`` for computations that hit a
degeneracy or singularity.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..acceptance import run_criteria
from ..errors import ConfigError, NumericalError
from ..runs import dispatch
from ..tables import ResultTable
from .schemas import (
    CriterionSchema,
    HealthResponse,
    RunRequest,
    TableResponse,
    VerifyRequest,
    VerifyResponse,
)


def _table_response(table: ResultTable) -> TableResponse:
    # NaN is not valid JSON; ship it as None and let clients map it back.
    rows = [
        [None if math.isnan(v) else float(v) for v in row]  # type: ignore[misc]
        for row in table.rows
    ]
    return TableResponse(columns=list(table.columns), rows=rows, metadata=table.metadata)


def create_app() -> FastAPI:
    app = FastAPI(
        title="tubedynamo",
        version=__version__,
        description="Curvature, Ricci-flow and dynamo diagnostics for twisted flux tubes",
    )

    @app.exception_handler(NumericalError)
    async def numerical_error_handler(request: Request, exc: NumericalError):
        return JSONResponse(status_code=400, content={"kind": "numerical", "detail": str(exc)})

    @app.exception_handler(ConfigError)
    async def config_error_handler(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"kind": "validation", "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"kind": "validation", "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(name="tubedynamo", version=__version__)

    def _run(command: str, req: RunRequest) -> TableResponse:
        return _table_response(dispatch(command, req.to_inputs()))

    @app.post("/curvature", response_model=TableResponse)
    def curvature(req: RunRequest) -> TableResponse:
        return _run("curvature", req)

    @app.post("/tube", response_model=TableResponse)
    def tube(req: RunRequest) -> TableResponse:
        return _run("tube", req)

    @app.post("/ricci-flow", response_model=TableResponse)
    def ricci_flow(req: RunRequest) -> TableResponse:
        return _run("ricci-flow", req)

    @app.post("/lyapunov", response_model=TableResponse)
    def lyapunov(req: RunRequest) -> TableResponse:
        return _run("lyapunov", req)

    @app.post("/dynamo", response_model=TableResponse)
    def dynamo(req: RunRequest) -> TableResponse:
        return _run("dynamo", req)

    @app.post("/cl-spectrum", response_model=TableResponse)
    def cl_spectrum(req: RunRequest) -> TableResponse:
        return _run("cl-spectrum", req)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest | None = None) -> VerifyResponse:
        ids = req.ids if req is not None else None
        results = run_criteria(ids)
        return VerifyResponse(
            criteria=[
                CriterionSchema(
                    cid=r.cid, name=r.name, passed=r.passed,
                    detail=r.detail, elapsed=r.elapsed,
                )
                for r in results
            ],
            all_passed=all(r.passed for r in results),
        )

    return app


app = create_app()
