"""Pydantic request/response models shared by the HTTP service and the CLI."""

from typing import Optional, Union

from pydantic import BaseModel, Field


class DriftTerm(BaseModel):
    kind: str  # "sin" | "cos" | "const"
    coeff: float
    state_index: int = 0
    frequency: float = 1.0


class SystemDocument(BaseModel):
    """Inline linear system with optional sinusoidal/constant drift terms."""

    A: list[list[float]]
    Bc: list[list[float]]
    Buc: list[list[float]]
    drift_terms: list[DriftTerm] = []
    Df: float = Field(ge=0)
    Dg: float = Field(ge=0)
    x0: list[float]
    xtg: list[float]


class StrategySpec(BaseModel):
    kind: str = "bang_bang"
    params: dict = {}


class RunRequest(BaseModel):
    """One run: a system, a horizon, a target radius and a disturbance.

    `system` is the builtin name "admire", a path to a system JSON file, or
    an inline SystemDocument.  `x0`/`xtg` override the system's own values.
    `output_dir` is only meaningful to the CLI (the service never writes
    files).
    """

    system: Union[SystemDocument, str] = "admire"
    x0: Optional[list[float]] = None
    xtg: Optional[list[float]] = None
    t_f: float = Field(gt=0)
    epsilon: float = Field(gt=0)
    n_bar_override: Optional[int] = Field(default=None, ge=1)
    strategy: StrategySpec = StrategySpec()
    steps_per_interval: int = Field(default=256, ge=16)
    seed: int = 0
    output_dir: Optional[str] = None


class FeasibilityResponse(BaseModel):
    c: float
    c1: float
    c2: float
    D_S: float
    conditions_hold: bool
    t_star: Optional[float] = None
    feasible_interval: Optional[list[float]] = None
    tf_lower_bound: float
    t_f: Optional[float] = None
    tf_valid: bool
    notes: list[str] = []


class ScheduleRow(BaseModel):
    n: int
    t_start: float
    t_end: float
    u_c: list[float]


class NodeErrorRow(BaseModel):
    n: int
    t_n: float
    err: float
    bound: float


class TracePayload(BaseModel):
    times: list[float]
    states: list[list[float]]
    uc: list[list[float]]
    uuc: list[list[float]]


class RunSummary(BaseModel):
    final_error: float
    constraint_max: float
    violations: dict
    runtime_seconds: float
    final_error_ok: bool
    n1: int
    n_bar: int
    epsilon: float
    t_f: float
    tf_valid: bool
    strategy: str
    seed: int
    steps_per_interval: int


class SimulationResponse(BaseModel):
    feasibility: FeasibilityResponse
    summary: RunSummary
    schedule: list[ScheduleRow]
    node_errors: list[NodeErrorRow]
    trace: TracePayload
