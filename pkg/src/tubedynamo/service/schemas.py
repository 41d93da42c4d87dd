"""Pydantic request/response models of the diagnostics service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..runs import RunInputs, Sweep
from ..tube import FlowField, TabulatedProfile, TubeParams


class TubeSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kappa0: float = 1.0
    kappa_table: Optional[list[tuple[float, float]]] = None
    tau0: float = 0.0
    tau_table: Optional[list[tuple[float, float]]] = None
    r0: float = 0.1
    mode: Literal["thin", "thick"] = "thin"

    def to_params(self) -> TubeParams:
        kappa = (
            TabulatedProfile(*zip(*self.kappa_table)) if self.kappa_table else self.kappa0
        )
        tau = TabulatedProfile(*zip(*self.tau_table)) if self.tau_table else self.tau0
        return TubeParams(kappa=kappa, tau=tau, r0=self.r0, mode=self.mode)


class FlowSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vr: float = 0.0
    vtheta: float = 0.0
    vs: float = 0.0
    omega1: float = 0.0

    def to_field(self) -> FlowField:
        return FlowField(vr=self.vr, vtheta=self.vtheta, vs=self.vs, omega1=self.omega1)


class SweepSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    var: str
    start: float
    stop: float
    count: int = Field(ge=1)


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tube: TubeSchema = TubeSchema()
    flow: FlowSchema = FlowSchema()
    theta: float = 0.0
    s: float = 0.0
    r: float = 1.0
    eps: float = 0.0
    kappa: float = 4.0
    rem: float = 1.0
    t_end: float = 0.1
    dt: float = 1e-3
    sweeps: list[SweepSchema] = []

    def to_inputs(self) -> RunInputs:
        return RunInputs(
            tube=self.tube.to_params(),
            flow=self.flow.to_field(),
            theta=self.theta,
            s=self.s,
            r=self.r,
            eps=self.eps,
            kappa=self.kappa,
            rem=self.rem,
            t_end=self.t_end,
            dt=self.dt,
            sweeps=tuple(Sweep(sw.var, sw.start, sw.stop, sw.count) for sw in self.sweeps),
        )


class TableResponse(BaseModel):
    # NaN is not representable in strict JSON; such cells travel as null.
    columns: list[str]
    rows: list[list[Optional[float]]]
    metadata: dict[str, Any]


class CriterionSchema(BaseModel):
    cid: int
    name: str
    passed: bool
    detail: str
    elapsed: float


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ids: Optional[list[int]] = None


class VerifyResponse(BaseModel):
    criteria: list[CriterionSchema]
    all_passed: bool


class HealthResponse(BaseModel):
    name: str
    version: str
