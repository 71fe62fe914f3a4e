"""HTTP front end over the handler functions."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(title="gmsr", description="mesh interest point detection service")

    @app.exception_handler(ValueError)
    def bad_data(request: Request, exc: ValueError):
        # Covers mesh/ground-truth format errors and invalid parameter
        # combinations surfaced by the core modules.
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/detect", response_model=schemas.DetectResponse)
    def detect(request: schemas.DetectRequest):
        return handlers.run_detect(request)

    @app.post("/saliency", response_model=schemas.SaliencyResponse)
    def saliency(request: schemas.SaliencyRequest):
        return handlers.run_saliency(request)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(request: schemas.EvaluateRequest):
        return handlers.run_evaluate(request)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(request: schemas.SweepRequest):
        return handlers.run_sweep(request)

    return app
