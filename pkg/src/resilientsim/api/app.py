"""HTTP front end wrapping the service functions."""

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ResilientSimError
from . import service
from .schemas import FeasibilityResponse, RunRequest, SimulationResponse


def create_app() -> FastAPI:
    app = FastAPI(
        title="resilientsim",
        description="Finite-time control synthesis under partial loss of "
        "control authority: feasibility analysis and closed-loop simulation.",
    )

    @app.exception_handler(ResilientSimError)
    async def _domain_error(request: Request, exc: ResilientSimError):
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/feasibility", response_model=FeasibilityResponse)
    def feasibility(req: RunRequest):
        return service.run_feasibility(req)

    @app.post("/simulate", response_model=SimulationResponse)
    def simulate(req: RunRequest):
        return service.run_simulation(req)

    @app.post("/demo/admire", response_model=SimulationResponse)
    def demo_admire(seed: Optional[int] = None, strategy: Optional[str] = None):
        return service.run_simulation(service.demo_request(seed, strategy))

    return app


app = create_app()
