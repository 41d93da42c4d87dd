"""Twisted flux-tube geometry: metric family, twist angle and closed-form curvatures.

The tube chart is (r, theta_R, s) with r the cross-section radius coordinate,
theta_R the untwisted azimuthal angle and s the arclength along the tube axis.
The twisted angle is theta(s) = theta_R - integral_0^s tau(u) du and the metric
stretch coefficient is K = 1 - r kappa(s) cos(theta).

Curvature kappa and torsion tau enter as profiles of arclength, either constant
or tabulated (cubic interpolation), so tube parameter files map directly onto
:class:`TubeParams`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericalError, SingularityError
from .geometry import Coords, MetricSpec, as_coords

__all__ = [
    "Profile",
    "ConstantProfile",
    "TabulatedProfile",
    "FuncProfile",
    "as_profile",
    "TubeParams",
    "FlowField",
    "TwistState",
    "FrenetFrame",
    "frenet_frame_helix",
    "twist_angle",
    "twist_state",
    "tube_metric_3d",
    "tube_surface_metric",
    "stretch_coefficient",
    "analytic_r1212",
    "surface_r1212",
    "analytic_gauss",
    "negative_gauss_condition",
    "riemann_xyy_tube",
    "analytic_sectional",
    "incompressibility_residual",
]


# ---------------------------------------------------------------------------
# scalar profiles of arclength
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantProfile:
    value: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, self.value)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TabulatedProfile:
    """Tabulated samples (s_i, value_i) with cubic interpolation between them."""

    s_values: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.s_values) != len(self.values) or len(self.s_values) < 2:
            raise ValueError("tabulated profile needs at least two (s, value) samples")
        s = np.asarray(self.s_values, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(v))):
            raise ValueError("tabulated profile contains non-finite samples")
        if np.any(np.diff(s) <= 0):
            raise ValueError("tabulated profile abscissae must be strictly increasing")
        object.__setattr__(self, "_spline", CubicSpline(s, v, extrapolate=True))

    def __call__(self, s):
        out = self._spline(np.asarray(s, dtype=float))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FuncProfile:
    fn: Callable[[float], float]

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        if s_arr.ndim == 0:
            return float(self.fn(float(s_arr)))
        return np.array([self.fn(float(u)) for u in s_arr])


Profile = Union[ConstantProfile, TabulatedProfile, FuncProfile]


def as_profile(p) -> Profile:
    if isinstance(p, (ConstantProfile, TabulatedProfile, FuncProfile)):
        return p
    if isinstance(p, (int, float)):
        return ConstantProfile(float(p))
    if callable(p):
        return FuncProfile(p)
    raise TypeError(f"cannot interpret {p!r} as a profile")


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TubeParams:
    """Tube geometry: curvature/torsion profiles, cross-section radius, mode.

    ``thin`` mode treats the stretch coefficient K as 1 (valid when
    r kappa << 1); ``thick`` keeps the full K = 1 - r kappa cos(theta).
    """

    kappa: Profile
    tau: Profile
    r0: float = 0.1
    mode: Literal["thin", "thick"] = "thin"

    def __post_init__(self):
        object.__setattr__(self, "kappa", as_profile(self.kappa))
        object.__setattr__(self, "tau", as_profile(self.tau))
        if self.r0 < 0:
            raise ValueError(f"r0 must be non-negative, got {self.r0}")
        if self.mode not in ("thin", "thick"):
            raise ValueError(f"mode must be 'thin' or 'thick', got {self.mode!r}")

    def kappa_at(self, s: float) -> float:
        return float(self.kappa(s))

    def tau_at(self, s: float) -> float:
        return float(self.tau(s))

    @property
    def thin(self) -> bool:
        return self.mode == "thin"


@dataclass(frozen=True)
class FlowField:
    """Plasma flow inside the tube.

    vr is a radial-velocity profile of r, vtheta an azimuthal profile of s,
    vs the axial velocity and omega1 a constant vorticity. The dynamo regime
    of interest has vr < 0 (compression) and vs >> vtheta; that is reported
    by :meth:`regime_notes`, not enforced.
    """

    vr: Union[float, Callable[[float], float]] = 0.0
    vtheta: Union[float, Callable[[float], float]] = 0.0
    vs: float = 0.0
    omega1: float = 0.0

    def __post_init__(self):
        for name in ("vs", "omega1"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def vr_at(self, r: float) -> float:
        return float(self.vr(r)) if callable(self.vr) else float(self.vr)

    def vtheta_at(self, s: float) -> float:
        return float(self.vtheta(s)) if callable(self.vtheta) else float(self.vtheta)

    def regime_notes(self, r: float = 1.0, s: float = 0.0) -> tuple[str, ...]:
        notes = []
        if self.vr_at(r) >= 0.0:
            notes.append("radial-flow-not-compressive")
        if abs(self.vs) <= abs(self.vtheta_at(s)):
            notes.append("axial-flow-not-dominant")
        return tuple(notes)


@dataclass(frozen=True)
class TwistState:
    """Untwisted angle theta_R and the torsion-corrected angle theta(s)."""

    theta_r: float
    theta: float


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal (tangent, normal, binormal) frame along the tube axis."""

    t_vec: tuple[float, float, float]
    n_vec: tuple[float, float, float]
    b_vec: tuple[float, float, float]

    def __post_init__(self):
        m = self.matrix
        if np.max(np.abs(m @ m.T - np.eye(3))) > 1e-12:
            raise ValueError("Frenet frame vectors are not orthonormal")
        if np.max(np.abs(np.cross(m[0], m[1]) - m[2])) > 1e-12:
            raise ValueError("binormal must equal t x n")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.t_vec, self.n_vec, self.b_vec], dtype=float)


def frenet_frame_helix(kappa0: float, tau0: float, s: float) -> FrenetFrame:
    """Frenet frame at arclength s of the constant-curvature, constant-torsion helix."""
    w2 = kappa0 * kappa0 + tau0 * tau0
    if w2 <= 0:
        raise ValueError("helix frame needs kappa0 or tau0 nonzero")
    w = math.sqrt(w2)
    a = kappa0 / w2
    b = tau0 / w2
    u = w * s
    t = (-a * w * math.sin(u), a * w * math.cos(u), b * w)
    n = (-math.cos(u), -math.sin(u), 0.0)
    bv = tuple(np.cross(t, n))
    return FrenetFrame(t_vec=t, n_vec=n, b_vec=bv)


# ---------------------------------------------------------------------------
# twist angle
# ---------------------------------------------------------------------------


def _composite_simpson(f: Profile, a: float, b: float, n: int) -> float:
    x = np.linspace(a, b, n + 1)
    y = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite torsion sample inside the twist quadrature")
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum()))


def _adaptive_simpson(f: Profile, a: float, b: float, rtol: float) -> float:
    n = 8
    prev = _composite_simpson(f, a, b, n)
    while n <= 2 ** 22:
        n *= 2
        cur = _composite_simpson(f, a, b, n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NumericalError("twist quadrature failed to converge")


def twist_angle(
    params: TubeParams,
    theta_r: float,
    s: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Twisted angle theta(s) = theta_R - integral_0^s tau(u) du.

    Constant torsion integrates in closed form; anything else goes through a
    composite Simpson rule refined to the configured relative tolerance.
    """
    tau = params.tau
    if isinstance(tau, ConstantProfile):
        return theta_r - tau.value * s
    if s == 0.0:
        return float(theta_r)
    lo, hi, sign = (0.0, s, 1.0) if s > 0 else (s, 0.0, -1.0)
    return theta_r - sign * _adaptive_simpson(tau, lo, hi, tol.quadrature_rtol)


def twist_state(params: TubeParams, theta_r: float, s: float, **kw) -> TwistState:
    return TwistState(theta_r=float(theta_r), theta=twist_angle(params, theta_r, s, **kw))


def stretch_coefficient(params: TubeParams, r: float, theta: float, s: float) -> float:
    """K(r, s) = 1 - r kappa(s) cos(theta), with theta already twisted."""
    return 1.0 - r * params.kappa_at(s) * math.cos(theta)


# ---------------------------------------------------------------------------
# metric constructors
# ---------------------------------------------------------------------------


def tube_metric_3d(params: TubeParams, *, tol: Tolerances = DEFAULT_TOLERANCES) -> MetricSpec:
    """3D tube metric diag(1, r^2, K^2) on the chart (r, theta_R, s).

    Thin mode pins K to 1 (the metric becomes cylindrical, hence flat); thick
    mode uses K = 1 - r kappa(s) cos(theta(s)). The domain predicate keeps
    r > 0 and, in thick mode, K > 0.
    """
    thin = params.thin

    def evaluate(x, t):
        r, theta_r, s = x
        if thin:
            k = 1.0
        else:
            theta = twist_angle(params, theta_r, s, tol=tol)
            k = 1.0 - r * params.kappa_at(s) * math.cos(theta)
        return np.diag([1.0, r * r, k * k])

    def domain(x):
        r, theta_r, s = x
        if r <= 0.0:
            return False
        if thin:
            return True
        theta = twist_angle(params, theta_r, s, tol=tol)
        return 1.0 - r * params.kappa_at(s) * math.cos(theta) > 0.0

    return MetricSpec(dim=3, evaluate=evaluate, domain=domain, name="tube3d")


def tube_surface_metric(params: TubeParams, *, tol: Tolerances = DEFAULT_TOLERANCES) -> MetricSpec:
    """Constant-radius tube surface metric diag(r0^2, K^2) on the chart (theta_R, s).

    The surface metric always carries the full stretch coefficient
    K(s) = 1 - r0 kappa(s) cos(theta(s)); the thin/thick mode switch only
    affects the closed-form curvature helpers.
    """
    if params.r0 <= 0.0:
        raise ValueError("tube surface metric needs r0 > 0")
    r0 = params.r0

    def k_at(theta_r, s):
        theta = twist_angle(params, theta_r, s, tol=tol)
        return 1.0 - r0 * params.kappa_at(s) * math.cos(theta)

    def evaluate(x, t):
        k = k_at(x[0], x[1])
        return np.diag([r0 * r0, k * k])

    return MetricSpec(
        dim=2,
        evaluate=evaluate,
        domain=lambda x: k_at(x[0], x[1]) > 0.0,
        name="tube-surface",
    )


# ---------------------------------------------------------------------------
# closed-form curvature values
# ---------------------------------------------------------------------------


def analytic_r1212(params: TubeParams, s: float, theta: float) -> float:
    """Closed-form surface curvature component in the -kappa K cos(theta) convention.

    Direct evaluation of the surface metric carries an extra factor r0 (see
    :func:`surface_r1212`); this transcribed form is kept, and both are
    reported side by side by the tube diagnostics.
    """
    kappa = params.kappa_at(s)
    k = 1.0 - params.r0 * kappa * math.cos(theta)
    return -kappa * k * math.cos(theta)


def surface_r1212(params: TubeParams, s: float, theta: float) -> float:
    """R_1212 of the surface metric diag(r0^2, K^2): -r0 kappa(s) K(s) cos(theta).

    Derivation: with only the theta_R-dependence of K contributing,
    R_1212 = -K d^2K/dtheta_R^2 and d^2K/dtheta_R^2 = r0 kappa cos(theta).
    """
    return params.r0 * analytic_r1212(params, s, theta)


def analytic_gauss(params: TubeParams, s: float, theta: float) -> float:
    """Closed-form Gauss curvature of the tube surface.

    Thick mode: -kappa(s) K(s) cos(theta) / r0 (the r0^2 normalization
    convention, see ``gauss_paper_det`` in the tube diagnostics). Thin mode
    specializes to the constant-curvature form -kappa0 cos(theta) / r0.
    """
    if params.r0 == 0.0:
        raise ValueError("Gauss curvature of a zero-radius tube surface is undefined")
    kappa = params.kappa_at(s)
    if params.thin:
        return -kappa * math.cos(theta) / params.r0
    k = 1.0 - params.r0 * kappa * math.cos(theta)
    return -kappa * k * math.cos(theta) / params.r0


def negative_gauss_condition(params: TubeParams, theta: float) -> bool:
    """Thin-tube sign law: the Gauss curvature is negative iff kappa0 cos(theta) > 0.

    Holds for either sign of the axis curvature, as long as it and cos(theta)
    agree in sign.
    """
    return params.kappa_at(0.0) * math.cos(theta) > 0.0


def riemann_xyy_tube(
    flow: FlowField,
    params: TubeParams,
    theta: float,
    s: float,
) -> np.ndarray:
    """Curvature vector R(X, Y)Y of the radially perturbed tube flow.

    Components are returned in the frame (e_theta, t, n):

        [vs - 1/tau] * (vtheta kappa tau sin(theta),
                        -tau vtheta sin(theta),
                        vs kappa)

    The 1/tau prefactor subtracts a length from a velocity; the expression is
    transcribed as printed and flagged as dimensionally suspect by the tube
    diagnostics. Assumes the thin-tube drop of the O(v^3) commutator term and
    of radial derivatives of vtheta, vs.
    """
    tau = params.tau_at(s)
    if tau == 0.0:
        raise SingularityError("riemann_xyy_tube needs nonzero torsion (1/tau appears)")
    kappa = params.kappa_at(s)
    vtheta = flow.vtheta_at(s)
    vs = flow.vs
    pref = vs - 1.0 / tau
    return pref * np.array(
        [
            vtheta * kappa * tau * math.sin(theta),
            -tau * vtheta * math.sin(theta),
            vs * kappa,
        ]
    )


def analytic_sectional(
    params: TubeParams,
    flow: FlowField,
    vr_pert: float,
    theta: float,
    s: float,
) -> float:
    """Closed-form sectional curvature kappa(s) cos(theta) / (vr_pert vs).

    Negative whenever the numerator and the velocity product disagree in sign,
    which is the regime of interest for a compressive radial perturbation
    (vr_pert < 0) with forward axial flow.
    """
    denom = vr_pert * flow.vs
    if denom == 0.0:
        raise SingularityError("sectional closed form needs vr_pert != 0 and vs != 0")
    return params.kappa_at(s) * math.cos(theta) / denom


def incompressibility_residual(
    flow: FlowField,
    params: TubeParams,
    point: Coords,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Residual of the incompressibility closure d_s vtheta = kappa tau r sin(theta) vtheta.

    Zero means the azimuthal profile satisfies the closure at the point; the
    s-derivative is a central difference.
    """
    x = as_coords(point)
    r, theta_r, s = x
    theta = twist_angle(params, theta_r, s, tol=tol)
    h = tol.fd_step * max(1.0, abs(s))
    dvtheta = (flow.vtheta_at(s + h) - flow.vtheta_at(s - h)) / (2.0 * h)
    coeff = params.kappa_at(s) * params.tau_at(s) * r * math.sin(theta)
    return dvtheta - coeff * flow.vtheta_at(s)
