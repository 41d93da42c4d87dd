"""Ricci flow at a chart point, the generalized Ricci eigenproblem and the
tube eigen-matrix.

The flow integrates dg/dt = -2 Ric(g) with classical fourth-order Runge-Kutta.
It is a pointwise flow: the state is the metric matrix at one chart point, and
at every stage the Ricci tensor is recomputed from a metric field whose
functional form is frozen (taken from the spec) but rescaled component-wise so
it passes through the current matrix value at the point. Full PDE Ricci flow
is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DegenerateMetricError, SingularityError
from .geometry import Coords, MetricSpec, as_coords, curvature_bundle
from .tube import FlowField

__all__ = [
    "FlowState",
    "RicciEigenSpectrum",
    "DiagonalFlowSolution",
    "TubeEigenReport",
    "ricci_eigenproblem",
    "generalized_eigh_jacobi",
    "pointwise_ricci_fn",
    "diagonal_ricci_fn",
    "ricci_flow_step",
    "ricci_flow_trajectory",
    "closed_form_diagonal",
    "diagonal_flow_solution",
    "flow_eigenrate",
    "tube_eigen_matrix",
    "tube_lyapunov_spectrum",
]

RicciFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class FlowState:
    """Metric matrix at a fixed chart point, at flow time t."""

    t: float
    metric: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.metric, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("flow state metric must be a square matrix")
        object.__setattr__(self, "metric", g)


@dataclass(frozen=True)
class RicciEigenSpectrum:
    """Solution of R chi = lambda g chi; eigvecs holds g-orthonormal columns."""

    lambdas: np.ndarray
    eigvecs: np.ndarray


@dataclass(frozen=True)
class DiagonalFlowSolution:
    """Evaluator of the diagonal flow solution t -> diag(exp(-2 lambda_i t))."""

    lambdas: tuple[float, ...]

    def __call__(self, t: float) -> np.ndarray:
        return closed_form_diagonal(self.lambdas, t)


@dataclass(frozen=True)
class TubeEigenReport:
    """The diagonal eigen-matrix, its determinant at the given lambda, and the
    lambda roots of the determinant."""

    matrix: np.ndarray
    determinant: float
    roots: tuple[float, float, float]
    notes: tuple[str, ...]


# ---------------------------------------------------------------------------
# generalized symmetric eigenproblem (cyclic Jacobi on the Cholesky reduction)
# ---------------------------------------------------------------------------


def _jacobi_eigh(a: np.ndarray, off_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix. Returns (w, V) with
    columns of V the eigenvectors, unsorted."""
    n = a.shape[0]
    m = a.copy()
    v = np.eye(n)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return np.zeros(n), v
    for _ in range(60):
        off = np.sqrt(np.sum(np.tril(m, -1) ** 2) * 2.0)
        if off <= off_tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # classic 2x2 rotation annihilating m[p, q]
                tau = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
                v = v @ rot
    return np.diag(m).copy(), v


def generalized_eigh_jacobi(
    a: np.ndarray,
    b: np.ndarray,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve a x = lambda b x for symmetric a and positive-definite b.

    Reduction: b = L L^T, C = L^-1 a L^-T, Jacobi-diagonalize C, map the
    eigenvectors back through L^-T (which makes them b-orthonormal).
    Eigenvalues come back ascending; each eigenvector is sign-fixed so its
    largest-magnitude component is positive.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        chol = np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetricError("metric in the eigenproblem is not positive-definite") from exc
    c = np.linalg.solve(chol, np.linalg.solve(chol, a.T).T)
    c = 0.5 * (c + c.T)
    w, y = _jacobi_eigh(c, tol.jacobi_off)
    vecs = np.linalg.solve(chol.T, y)
    order = np.argsort(w)
    w = w[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return w, vecs


def ricci_eigenproblem(
    ricci: np.ndarray,
    g: np.ndarray,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RicciEigenSpectrum:
    """Eigenvalues and g-orthonormal eigenvectors of R chi = lambda g chi."""
    w, vecs = generalized_eigh_jacobi(ricci, g, tol=tol)
    return RicciEigenSpectrum(lambdas=w, eigvecs=vecs)


# ---------------------------------------------------------------------------
# pointwise Ricci flow
# ---------------------------------------------------------------------------


def pointwise_ricci_fn(
    spec: MetricSpec,
    point: Coords,
    *,
    shape_time: float = 0.0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RicciFn:
    """Ricci evaluator for the pointwise flow at ``point``.

    Given the current metric matrix G at the point, the surrounding field is
    modeled as the spec's field rescaled component-wise so it equals G at the
    point (entries that vanish at the point are shifted additively instead).
    The Ricci tensor of that field is computed numerically at the point.
    """
    x0 = as_coords(point)
    g_ref = np.asarray(spec.evaluate(x0, shape_time), dtype=float)
    ref_scale = np.max(np.abs(g_ref))
    mask = np.abs(g_ref) > 1e-12 * max(ref_scale, 1.0)
    safe_ref = np.where(mask, g_ref, 1.0)

    def ricci_of(g_now: np.ndarray, t: float) -> np.ndarray:
        scale = np.where(mask, g_now / safe_ref, 1.0)
        offset = np.where(mask, 0.0, g_now - g_ref)

        def evaluate(x, tt):
            base = np.asarray(spec.evaluate(x, shape_time), dtype=float)
            return base * scale + offset

        rescaled = MetricSpec(dim=spec.dim, evaluate=evaluate, domain=spec.domain)
        return curvature_bundle(rescaled, x0, shape_time, tol=tol).ricci

    return ricci_of


def diagonal_ricci_fn(lambdas: Sequence[float]) -> RicciFn:
    """Ricci model with fixed diagonal eigenvalues: Ric_ii = lambda_i g_ii.

    Under dg/dt = -2 Ric this reproduces the exponential diagonal flow
    g_ii(t) = exp(-2 lambda_i t) g_ii(0).
    """
    lam = np.asarray(lambdas, dtype=float)

    def ricci_of(g_now: np.ndarray, t: float) -> np.ndarray:
        return np.diag(lam * np.diag(g_now))

    return ricci_of


def _check_positive(g: np.ndarray, ratio: float, when: str) -> None:
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    if w[0] <= ratio * max(abs(w[-1]), 1e-300):
        raise SingularityError(f"metric lost positive-definiteness {when} (flow singularity)")


def ricci_flow_step(
    spec: Optional[MetricSpec],
    state: FlowState,
    dt: float,
    point: Optional[Coords] = None,
    *,
    ricci_fn: Optional[RicciFn] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FlowState:
    """One classical RK4 step of dg/dt = -2 Ric(g).

    The Ricci tensor is recomputed at every stage, either by ``ricci_fn`` or,
    when a spec and point are given, by the pointwise field model of
    :func:`pointwise_ricci_fn`. Raises SingularityError if any stage metric
    loses positive-definiteness.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if ricci_fn is None:
        if spec is None or point is None:
            raise ValueError("ricci_flow_step needs either ricci_fn or (spec, point)")
        ricci_fn = pointwise_ricci_fn(spec, point, shape_time=state.t, tol=tol)

    g0 = state.metric
    t0 = state.t
    _check_positive(g0, tol.metric_eig_ratio, f"at t={t0}")

    def f(g, t):
        _check_positive(g, tol.metric_eig_ratio, f"at a stage near t={t}")
        return -2.0 * np.asarray(ricci_fn(g, t), dtype=float)

    k1 = f(g0, t0)
    k2 = f(g0 + 0.5 * dt * k1, t0 + 0.5 * dt)
    k3 = f(g0 + 0.5 * dt * k2, t0 + 0.5 * dt)
    k4 = f(g0 + dt * k3, t0 + dt)
    g1 = g0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_positive(g1, tol.metric_eig_ratio, f"after the step to t={t0 + dt}")
    return FlowState(t=t0 + dt, metric=g1)


def ricci_flow_trajectory(
    spec: Optional[MetricSpec],
    point: Optional[Coords],
    t_end: float,
    dt: float,
    *,
    state0: Optional[FlowState] = None,
    ricci_fn: Optional[RicciFn] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[FlowState]:
    """Integrate the pointwise flow from t=0 (or ``state0``) to t_end in steps of dt."""
    if state0 is None:
        if spec is None or point is None:
            raise ValueError("trajectory needs either state0 or (spec, point)")
        g0 = np.asarray(spec.evaluate(as_coords(point), 0.0), dtype=float)
        state0 = FlowState(t=0.0, metric=g0)
    if ricci_fn is None:
        ricci_fn = pointwise_ricci_fn(spec, point, shape_time=state0.t, tol=tol)
    n_steps = int(round((t_end - state0.t) / dt))
    states = [state0]
    for _ in range(n_steps):
        states.append(ricci_flow_step(None, states[-1], dt, ricci_fn=ricci_fn, tol=tol))
    return states


# ---------------------------------------------------------------------------
# diagonal closed form and its inverse
# ---------------------------------------------------------------------------


def closed_form_diagonal(lambdas: Sequence[float], t: float) -> np.ndarray:
    """diag(exp(-2 lambda_i t)), componentwise (no summation over i)."""
    lam = np.asarray(lambdas, dtype=float)
    return np.diag(np.exp(-2.0 * lam * t))


def diagonal_flow_solution(lambdas: Sequence[float]) -> DiagonalFlowSolution:
    return DiagonalFlowSolution(lambdas=tuple(float(v) for v in lambdas))


def flow_eigenrate(times: Sequence[float], metrics: Sequence[np.ndarray]) -> np.ndarray:
    """Recover lambda_i = -(d_t g_ii) / (2 g_ii) from a sampled diagonal flow.

    Uses second-order central differences in t on the interior samples and
    averages them, so a stationary rate is recovered to O(dt^2).
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise ValueError("flow_eigenrate needs at least three time samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time samples must be strictly increasing")
    mats = np.asarray(metrics, dtype=float)
    if mats.ndim == 3:
        scale = np.max(np.abs(mats))
        off = mats - np.array([np.diag(np.diag(m)) for m in mats])
        if np.max(np.abs(off)) > 1e-12 * max(scale, 1.0):
            raise ValueError("flow_eigenrate expects diagonal metrics")
        diags = np.array([np.diag(m) for m in mats])
    elif mats.ndim == 2:
        diags = mats
    else:
        raise ValueError("metrics must be a sequence of matrices or of diagonals")
    if diags.shape[0] != t.size:
        raise ValueError("times and metrics must have matching lengths")
    if np.any(diags <= 0.0):
        raise ValueError("flow_eigenrate expects positive diagonal entries")
    dg = np.gradient(diags, t, axis=0)
    rates = -dg / (2.0 * diags)
    return rates[1:-1].mean(axis=0)


# ---------------------------------------------------------------------------
# tube eigen-matrix and Lyapunov spectrum
# ---------------------------------------------------------------------------


def tube_eigen_matrix(g: np.ndarray, dtg: np.ndarray, lam: float) -> TubeEigenReport:
    """Diagonal eigen-matrix diag(2 lam g11, dtg22 + lam g22, dtg33 + lam g33).

    The determinant vanishes at lam in {0, -dtg22/g22, -dtg33/g33}; the first
    diagonal entry has the 2 lam g11 form, structurally different from the
    d_t g + lam g form of the other two, so it vanishes only at lam = 0
    (for g11 != 0). That asymmetry is surfaced in the notes.
    """
    g = np.asarray(g, dtype=float)
    dtg = np.asarray(dtg, dtype=float)
    for name, m in (("g", g), ("dtg", dtg)):
        if m.shape != (3, 3):
            raise ValueError(f"{name} must be 3x3, got {m.shape}")
        if np.max(np.abs(m - np.diag(np.diag(m)))) > 1e-12 * max(np.max(np.abs(m)), 1.0):
            raise ValueError(f"{name} must be diagonal")
    g11, g22, g33 = np.diag(g)
    d22, d33 = dtg[1, 1], dtg[2, 2]
    matrix = np.diag([2.0 * lam * g11, d22 + lam * g22, d33 + lam * g33])
    det = float(np.prod(np.diag(matrix)))
    roots = (
        0.0,
        -d22 / g22 if g22 != 0 else np.nan,
        -d33 / g33 if g33 != 0 else np.nan,
    )
    notes = (
        "first diagonal entry has the 2*lam*g11 form and vanishes only at lam=0; "
        "the other entries have the dg/dt + lam*g form",
    )
    return TubeEigenReport(matrix=matrix, determinant=det, roots=roots, notes=notes)


def tube_lyapunov_spectrum(
    flow: FlowField,
    r: float,
    theta: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float, float]:
    """Thick-tube Lyapunov spectrum (0, 2 vr/r, vr/r + omega1 tan(theta)).

    Transcribed literally; theta = pi/2 (mod pi) is a pole of the tangent and
    raises SingularityError.
    """
    if r <= 0:
        raise ValueError("tube Lyapunov spectrum needs r > 0")
    if abs(np.cos(theta)) < tol.tangent_cos:
        raise SingularityError("tan(theta) singular at theta = pi/2 (mod pi)")
    vr = flow.vr_at(r)
    lam2 = 2.0 * vr / r
    lam3 = 0.5 * lam2 + flow.omega1 * np.tan(theta)
    return (0.0, lam2, float(lam3))
