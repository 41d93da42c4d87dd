"""Command engines: turn a run configuration into a result table.

Each engine evaluates its quantity over the configured sweep grid (inclusive
linspace per swept variable, cartesian product in declared order with the last
variable fastest) and returns a :class:`ResultTable` whose metadata echoes the
effective configuration and any convention flags raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import DEFAULT_TOLERANCES, Tolerances
from .dynamo import (
    BS_RATE_FLAG,
    BTHETA_RATE_FLAG,
    LAMBDA2_CONVENTION_FLAG,
    chicone_latushkin_lambda,
    dynamo_constraint,
    field_growth,
)
from .errors import ConfigError
from .geometry import curvature_bundle
from .ricci import ricci_eigenproblem, ricci_flow_trajectory, pointwise_ricci_fn, tube_lyapunov_spectrum
from .tables import ResultTable
from .tube import (
    ConstantProfile,
    FlowField,
    TabulatedProfile,
    TubeParams,
    analytic_gauss,
    analytic_r1212,
    analytic_sectional,
    surface_r1212,
    stretch_coefficient,
    tube_metric_3d,
    tube_surface_metric,
    twist_angle,
)

__all__ = ["Sweep", "RunInputs", "dispatch", "COMMANDS", "SWEEPABLE"]

R1212_SCALE_FLAG = "r1212-closed-form-r0-scale"
DET_CONVENTION_FLAG = "gauss-det-normalization-duality"
EQ36_UNITS_FLAG = "curvature-vector-prefactor-units"
THETA_CLAMP_FLAG = "theta-clamped-at-tangent-pole"

COMMANDS = ("curvature", "tube", "ricci-flow", "lyapunov", "dynamo", "cl-spectrum", "verify")

SWEEPABLE = {
    "curvature": ("r", "theta", "s"),
    "tube": ("theta", "s"),
    "ricci-flow": (),
    "lyapunov": ("theta", "r"),
    "dynamo": ("theta", "r"),
    "cl-spectrum": ("eps", "kappa"),
}

# commands whose formulas hit the tan(theta) pole; their theta grids are clamped
_TAN_COMMANDS = ("lyapunov", "dynamo")
_THETA_CLAMP = 1e-6


@dataclass(frozen=True)
class Sweep:
    var: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"sweep over '{self.var}' needs count >= 1, got {self.count}")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start], dtype=float)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunInputs:
    """Domain-level inputs of one command run."""

    tube: TubeParams = field(default_factory=lambda: TubeParams(kappa=1.0, tau=0.0))
    flow: FlowField = field(default_factory=FlowField)
    theta: float = 0.0
    s: float = 0.0
    r: float = 1.0
    eps: float = 0.0
    kappa: float = 4.0
    rem: float = 1.0
    t_end: float = 0.1
    dt: float = 1e-3
    sweeps: tuple[Sweep, ...] = ()


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _clamp_theta(value: float) -> tuple[float, bool]:
    """Pull a theta value off the tan pole at pi/2 (mod pi)."""
    k = math.floor(value / math.pi)
    frac = value - k * math.pi
    if abs(frac - math.pi / 2.0) < _THETA_CLAMP:
        return k * math.pi + math.pi / 2.0 - _THETA_CLAMP, True
    return value, False


def _grid(inp: RunInputs, command: str) -> tuple[list[dict[str, float]], list[str]]:
    """Expand the sweeps into point dictionaries (base scalars + overrides)."""
    allowed = SWEEPABLE[command]
    base = {"theta": inp.theta, "s": inp.s, "r": inp.r, "eps": inp.eps, "kappa": inp.kappa}
    flags: list[str] = []
    for sw in inp.sweeps:
        if sw.var not in allowed:
            raise ConfigError(
                f"'{sw.var}' is not sweepable for the {command} command "
                f"(allowed: {', '.join(allowed) or 'none'})"
            )
    axes = []
    for sw in inp.sweeps:
        vals = sw.values()
        if sw.var == "theta" and command in _TAN_COMMANDS:
            clamped = []
            for v in vals:
                v2, did = _clamp_theta(float(v))
                clamped.append(v2)
                if did and THETA_CLAMP_FLAG not in flags:
                    flags.append(THETA_CLAMP_FLAG)
            vals = np.array(clamped)
        axes.append((sw.var, vals))
    points: list[dict[str, float]] = []

    def rec(i: int, acc: dict[str, float]):
        if i == len(axes):
            points.append(dict(acc))
            return
        var, vals = axes[i]
        for v in vals:
            acc[var] = float(v)
            rec(i + 1, acc)

    rec(0, dict(base))
    return points, flags


def _echo(inp: RunInputs, command: str) -> dict:
    tube = inp.tube
    kappa_desc = (
        f"constant:{tube.kappa.value}" if isinstance(tube.kappa, ConstantProfile)
        else "table" if isinstance(tube.kappa, TabulatedProfile) else "callable"
    )
    tau_desc = (
        f"constant:{tube.tau.value}" if isinstance(tube.tau, ConstantProfile)
        else "table" if isinstance(tube.tau, TabulatedProfile) else "callable"
    )
    return {
        "command": command,
        "version": __version__,
        "tube": {"kappa": kappa_desc, "tau": tau_desc, "r0": tube.r0, "mode": tube.mode},
        "flow": {
            "vr": inp.flow.vr if not callable(inp.flow.vr) else "callable",
            "vtheta": inp.flow.vtheta if not callable(inp.flow.vtheta) else "callable",
            "vs": inp.flow.vs,
            "omega1": inp.flow.omega1,
        },
        "scalars": {
            "theta": inp.theta, "s": inp.s, "r": inp.r, "eps": inp.eps,
            "kappa": inp.kappa, "rem": inp.rem, "t_end": inp.t_end, "dt": inp.dt,
        },
        "sweeps": [f"{s.var}={s.start}:{s.stop}:{s.count}" for s in inp.sweeps],
    }


def run_curvature(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    spec = tube_metric_3d(inp.tube, tol=tol)
    points, flags = _grid(inp, "curvature")
    columns = (
        "r", "theta_R", "s", "ricci_scalar",
        "ric_11", "ric_22", "ric_33", "ric_12", "ric_13", "ric_23",
        "riemann_1212", "riemann_1313", "riemann_2323",
    )
    rows = []
    for pt in points:
        x = (pt["r"], pt["theta"], pt["s"])
        b = curvature_bundle(spec, x, tol=tol)
        rd = b.riemann_down
        rows.append((
            x[0], x[1], x[2], b.scalar,
            b.ricci[0, 0], b.ricci[1, 1], b.ricci[2, 2],
            b.ricci[0, 1], b.ricci[0, 2], b.ricci[1, 2],
            rd[0, 1, 0, 1], rd[0, 2, 0, 2], rd[1, 2, 1, 2],
        ))
    meta = _echo(inp, "curvature")
    meta["flags"] = sorted(flags)
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_tube(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    params = inp.tube
    surface = tube_surface_metric(params, tol=tol)
    points, flags = _grid(inp, "tube")
    flags.extend([R1212_SCALE_FLAG, DET_CONVENTION_FLAG, EQ36_UNITS_FLAG])
    columns = (
        "s", "theta_R", "theta", "kappa", "stretch_K",
        "r1212_closed", "r1212_surface", "r1212_numeric",
        "gauss_numeric", "gauss_paper_det", "gauss_closed", "sectional_closed",
    )
    r0 = params.r0
    rows = []
    for pt in points:
        s, theta_r = pt["s"], pt["theta"]
        theta = twist_angle(params, theta_r, s, tol=tol)
        kappa = params.kappa_at(s)
        k = stretch_coefficient(params, r0, theta, s)
        b = curvature_bundle(surface, (theta_r, s), tol=tol)
        r1212_num = float(b.riemann_down[0, 1, 0, 1])
        det = float(np.linalg.det(b.metric))
        gauss_num = r1212_num / det
        gauss_paper = r1212_num / (r0 * r0)
        denom = inp.flow.vr_at(r0) * inp.flow.vs
        sect = (
            analytic_sectional(params, inp.flow, inp.flow.vr_at(r0), theta, s)
            if denom != 0.0
            else math.nan
        )
        rows.append((
            s, theta_r, theta, kappa, k,
            analytic_r1212(params, s, theta),
            surface_r1212(params, s, theta),
            r1212_num,
            gauss_num, gauss_paper,
            analytic_gauss(params, s, theta),
            sect,
        ))
    meta = _echo(inp, "tube")
    meta["flags"] = sorted(set(flags))
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_ricci_flow(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    spec = tube_metric_3d(inp.tube, tol=tol)
    point = (inp.r, inp.theta, inp.s)
    states = ricci_flow_trajectory(spec, point, inp.t_end, inp.dt, tol=tol)
    ricci_of = pointwise_ricci_fn(spec, point, tol=tol)
    columns = ("t", "g_11", "g_22", "g_33", "lambda_1", "lambda_2", "lambda_3")
    rows = []
    for st in states:
        ric = ricci_of(st.metric, st.t)
        lams = ricci_eigenproblem(ric, st.metric, tol=tol).lambdas
        g = st.metric
        rows.append((st.t, g[0, 0], g[1, 1], g[2, 2], lams[0], lams[1], lams[2]))
    meta = _echo(inp, "ricci-flow")
    meta["flags"] = []
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_lyapunov(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    points, flags = _grid(inp, "lyapunov")
    columns = ("theta", "r", "lambda_1", "lambda_2", "lambda_3",
               "Lambda_1", "Lambda_2", "Lambda_3")
    t = inp.t_end
    rows = []
    for pt in points:
        lams = tube_lyapunov_spectrum(inp.flow, pt["r"], pt["theta"], tol=tol)
        # near the clamped tangent pole the stretching factor can exceed the
        # float range; report it as inf rather than failing the sweep
        stretch = tuple(_safe_exp(2.0 * lam * t) for lam in lams)
        rows.append((pt["theta"], pt["r"]) + lams + stretch)
    meta = _echo(inp, "lyapunov")
    meta["flags"] = sorted(flags)
    meta["horizon"] = t
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_dynamo(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    points, flags = _grid(inp, "dynamo")
    flags.extend([LAMBDA2_CONVENTION_FLAG, BTHETA_RATE_FLAG, BS_RATE_FLAG])
    flags.extend(inp.flow.regime_notes(r=inp.r, s=inp.s))
    columns = (
        "theta", "r", "lambda_2", "lambda_3",
        "margin", "margin_spectrum", "satisfied", "stretch_ok", "contract_ok",
        "rate_theta", "rate_s", "amp_theta", "amp_s",
    )
    rows = []
    for pt in points:
        theta, r = pt["theta"], pt["r"]
        _, lam2, lam3 = tube_lyapunov_spectrum(inp.flow, r, theta, tol=tol)
        verdict = dynamo_constraint(inp.flow, theta, r, tol=tol)
        growth = field_growth(inp.flow, theta, r, inp.t_end, tol=tol)
        rows.append((
            theta, r, lam2, lam3,
            verdict.margin, verdict.margin_spectrum,
            float(verdict.satisfied), float(verdict.stretch_ok), float(verdict.contract_ok),
            growth.rate_theta, growth.rate_s, growth.amp_theta, growth.amp_s,
        ))
    meta = _echo(inp, "dynamo")
    meta["flags"] = sorted(set(flags))
    meta["horizon"] = inp.t_end
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_cl_spectrum(inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    points, flags = _grid(inp, "cl-spectrum")
    columns = ("eps", "kappa", "lambda_re", "lambda_im")
    rows = []
    for pt in points:
        lam = chicone_latushkin_lambda(pt["eps"], pt["kappa"])
        rows.append((pt["eps"], pt["kappa"], lam.real, lam.imag))
    meta = _echo(inp, "cl-spectrum")
    meta["flags"] = sorted(flags)
    return ResultTable(columns=columns, rows=rows, metadata=meta)


_ENGINES = {
    "curvature": run_curvature,
    "tube": run_tube,
    "ricci-flow": run_ricci_flow,
    "lyapunov": run_lyapunov,
    "dynamo": run_dynamo,
    "cl-spectrum": run_cl_spectrum,
}


def dispatch(command: str, inp: RunInputs, *, tol: Tolerances = DEFAULT_TOLERANCES) -> ResultTable:
    if command not in _ENGINES:
        raise ConfigError(f"unknown command {command!r}")
    return _ENGINES[command](inp, tol=tol)
