"""Numeric tensor calculus on a single coordinate chart.

Everything is derived from a :class:`MetricSpec`, a callable description of a
symmetric positive-definite metric field ``g_ij(x, t)``. Derivatives of the
metric are taken by central finite differences (first derivatives can instead
come from user-supplied analytic partials), so the kernel is generic over any
sufficiently smooth metric in dimension 2 or 3.

Index conventions
-----------------
Christoffel symbols are stored as ``gamma[k, i, j]`` with the upper index
first. The curvature tensor with one upper index is

    R^l_{jkp} = d_k Gamma^l_{pj} - d_p Gamma^l_{kj}
                + Gamma^l_{km} Gamma^m_{pj} - Gamma^l_{pm} Gamma^m_{kj}

stored as ``riemann_up[l, j, k, p]``; lowering the first index with the metric
at the evaluation point gives ``riemann_down``. The Ricci tensor is the
contraction ``R_jp = R^k_{jkp}`` and the scalar is ``g^{jp} R_jp``. With these
signs the unit 2-sphere has ``R_1212 = sin^2(x1)`` and sectional curvature +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DegenerateMetricError,
    DegeneratePlaneError,
    DomainError,
)

__all__ = [
    "ChartPoint",
    "MetricSpec",
    "TangentVector",
    "ChristoffelSymbols",
    "CurvatureBundle",
    "christoffel",
    "curvature_bundle",
    "sectional_curvature",
    "gauss_curvature_2d",
    "commutator",
    "covariant_derivative",
    "euclidean_metric",
    "polar_metric",
    "sphere_metric",
]

Coords = Union["ChartPoint", Sequence[float], np.ndarray]
VectorField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ChartPoint:
    """A point of a coordinate chart. Tube charts order coordinates (r, theta_R, s)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(c) for c in self.coords)
        if not all(math.isfinite(c) for c in vals):
            raise ValueError(f"non-finite chart coordinates: {vals}")
        object.__setattr__(self, "coords", vals)

    @classmethod
    def of(cls, *coords: float) -> "ChartPoint":
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


def as_coords(point: Coords) -> np.ndarray:
    """Normalize a ChartPoint or coordinate sequence to a float array."""
    if isinstance(point, ChartPoint):
        arr = np.asarray(point.coords, dtype=float)
    else:
        arr = np.asarray(point, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite chart coordinates: {arr!r}")
    return arr


@dataclass(frozen=True)
class MetricSpec:
    """A metric field on a chart.

    Parameters
    ----------
    dim :
        Chart dimension (2 or 3).
    evaluate :
        ``(coords, t) -> (dim, dim)`` symmetric matrix.
    domain :
        Predicate on coordinates; stencil points falling outside raise
        :class:`DomainError`. Defaults to the whole chart.
    partials :
        Optional analytic first partials ``(coords, t, k) -> (dim, dim)``
        returning ``d_k g``. When present they replace the first-derivative
        stencils and seed the second-derivative ones.
    """

    dim: int
    evaluate: Callable[[np.ndarray, float], np.ndarray]
    domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    partials: Optional[Callable[[np.ndarray, float, int], np.ndarray]] = None
    name: str = ""


@dataclass(frozen=True)
class TangentVector:
    """Coordinate-basis vector components attached to a chart point."""

    components: tuple[float, ...]
    point: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))
        object.__setattr__(self, "point", tuple(float(c) for c in self.point))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)


def _vector_components(v, dim: int) -> np.ndarray:
    arr = v.array if isinstance(v, TangentVector) else np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (dim,):
        raise ValueError(f"expected a {dim}-vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ChristoffelSymbols:
    """Levi-Civita connection coefficients gamma[k, i, j] at one point."""

    gamma: np.ndarray
    point: tuple[float, ...]


@dataclass(frozen=True)
class CurvatureBundle:
    """All curvature data of a metric at one point."""

    riemann_up: np.ndarray      # R^l_{jkp}, shape (d, d, d, d)
    riemann_down: np.ndarray    # R_{ljkp}
    ricci: np.ndarray           # R_{jp}
    scalar: float               # g^{jp} R_{jp}
    metric: np.ndarray          # g at the point
    point: tuple[float, ...]


# ---------------------------------------------------------------------------
# metric evaluation and finite differences
# ---------------------------------------------------------------------------


def _eval_metric(spec: MetricSpec, x: np.ndarray, t: float) -> np.ndarray:
    if not spec.domain(x):
        raise DomainError(f"point {tuple(x)} outside the metric domain")
    g = np.asarray(spec.evaluate(x, t), dtype=float)
    if g.shape != (spec.dim, spec.dim):
        raise ValueError(f"metric returned shape {g.shape}, expected {(spec.dim, spec.dim)}")
    return g


def _checked_metric(spec: MetricSpec, x: np.ndarray, t: float, tol: Tolerances):
    """Evaluate g at x, verify symmetry and positive-definiteness, return (g, g_inv)."""
    g = _eval_metric(spec, x, t)
    scale = np.max(np.abs(g))
    if scale == 0.0 or np.max(np.abs(g - g.T)) > 1e-9 * scale:
        raise ValueError(f"metric is not symmetric at {tuple(x)}")
    w = np.linalg.eigvalsh(g)
    if w[0] <= tol.metric_eig_ratio * abs(w[-1]):
        raise DegenerateMetricError(
            f"metric degenerate at {tuple(x)}: eigenvalues {w.tolist()}"
        )
    return g, np.linalg.inv(g)


def _stencil_eval(spec: MetricSpec, x: np.ndarray, t: float) -> np.ndarray:
    if not spec.domain(x):
        raise DomainError(
            f"finite-difference stencil point {tuple(x)} left the metric domain"
        )
    return np.asarray(spec.evaluate(x, t), dtype=float)


def _metric_jacobian(spec: MetricSpec, x: np.ndarray, t: float, tol: Tolerances) -> np.ndarray:
    """dg[k, i, j] = d_k g_ij by central differences (or analytic partials)."""
    d = spec.dim
    if spec.partials is not None:
        return np.stack([np.asarray(spec.partials(x, t, k), dtype=float) for k in range(d)])
    h = tol.fd_step * np.maximum(1.0, np.abs(x))
    dg = np.empty((d, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h[k]
        dg[k] = (_stencil_eval(spec, x + e, t) - _stencil_eval(spec, x - e, t)) / (2.0 * h[k])
    return dg


def _hessian_from_partials(spec, x, t, tol) -> np.ndarray:
    d = spec.dim
    h = tol.fd_step * np.maximum(1.0, np.abs(x))
    d2g = np.empty((d, d, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h[k]
        for l in range(d):
            hi = np.asarray(spec.partials(x + e, t, l), dtype=float)
            lo = np.asarray(spec.partials(x - e, t, l), dtype=float)
            d2g[k, l] = (hi - lo) / (2.0 * h[k])
    return 0.5 * (d2g + d2g.transpose(1, 0, 2, 3))


def _second_diff(spec, x, t, k: int, hk: float) -> np.ndarray:
    e = np.zeros_like(x)
    e[k] = hk
    return (
        _stencil_eval(spec, x + e, t)
        - 2.0 * _stencil_eval(spec, x, t)
        + _stencil_eval(spec, x - e, t)
    ) / (hk * hk)


def _mixed_diff(spec, x, t, k: int, l: int, hk: float, hl: float) -> np.ndarray:
    ek = np.zeros_like(x)
    ek[k] = hk
    el = np.zeros_like(x)
    el[l] = hl
    return (
        _stencil_eval(spec, x + ek + el, t)
        - _stencil_eval(spec, x + ek - el, t)
        - _stencil_eval(spec, x - ek + el, t)
        + _stencil_eval(spec, x - ek - el, t)
    ) / (4.0 * hk * hl)


def _metric_hessian(spec: MetricSpec, x: np.ndarray, t: float, tol: Tolerances) -> np.ndarray:
    """d2g[k, l, i, j] = d_k d_l g_ij.

    Pure second differences carry an eps/h^2 roundoff floor, so each stencil is
    evaluated at steps h and h/2 and combined with one Richardson level,
    (4 D(h/2) - D(h)) / 3, leaving O(h^4) truncation.
    """
    if spec.partials is not None:
        return _hessian_from_partials(spec, x, t, tol)
    d = spec.dim
    h = tol.fd2_step * np.maximum(1.0, np.abs(x))
    d2g = np.empty((d, d, d, d))
    for k in range(d):
        coarse = _second_diff(spec, x, t, k, h[k])
        fine = _second_diff(spec, x, t, k, 0.5 * h[k])
        d2g[k, k] = (4.0 * fine - coarse) / 3.0
    for k in range(d):
        for l in range(k + 1, d):
            coarse = _mixed_diff(spec, x, t, k, l, h[k], h[l])
            fine = _mixed_diff(spec, x, t, k, l, 0.5 * h[k], 0.5 * h[l])
            d2g[k, l] = (4.0 * fine - coarse) / 3.0
            d2g[l, k] = d2g[k, l]
    return d2g


def _gamma_from(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # T[l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
    t_low = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", g_inv, t_low)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def christoffel(
    spec: MetricSpec,
    point: Coords,
    t: float = 0.0,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ChristoffelSymbols:
    """Levi-Civita connection coefficients of ``spec`` at ``point``.

    Gamma^k_{ij} = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij), with metric
    derivatives by central differences unless the spec carries analytic
    partials.

    Raises
    ------
    DegenerateMetricError
        If the metric is not positive-definite at the point.
    DomainError
        If the point or a stencil point leaves the metric domain.
    """
    x = as_coords(point)
    _, g_inv = _checked_metric(spec, x, t, tol)
    dg = _metric_jacobian(spec, x, t, tol)
    return ChristoffelSymbols(gamma=_gamma_from(g_inv, dg), point=tuple(x))


def curvature_bundle(
    spec: MetricSpec,
    point: Coords,
    t: float = 0.0,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CurvatureBundle:
    """Riemann (both index positions), Ricci and scalar curvature at ``point``.

    The curvature is assembled algebraically from the metric value, its
    Jacobian and its Hessian, so only metric evaluations are differenced
    numerically.
    """
    x = as_coords(point)
    g, g_inv = _checked_metric(spec, x, t, tol)
    dg = _metric_jacobian(spec, x, t, tol)
    d2g = _metric_hessian(spec, x, t, tol)

    gamma = _gamma_from(g_inv, dg)
    # d_k g^{ml} = -g^{ma} (d_k g_ab) g^{bl}
    dg_inv = -np.einsum("ma,kab,bl->kml", g_inv, dg, g_inv)
    t_low = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    # dT[k, l, i, j] = d_k (d_i g_lj + d_j g_li - d_l g_ij)
    dt_low = np.einsum("kilj->klij", d2g) + np.einsum("kjli->klij", d2g) - d2g
    dgamma = 0.5 * (
        np.einsum("kml,lij->kmij", dg_inv, t_low)
        + np.einsum("ml,klij->kmij", g_inv, dt_low)
    )

    riemann_up = (
        np.einsum("klpj->ljkp", dgamma)
        - np.einsum("plkj->ljkp", dgamma)
        + np.einsum("lkm,mpj->ljkp", gamma, gamma)
        - np.einsum("lpm,mkj->ljkp", gamma, gamma)
    )
    riemann_down = np.einsum("lm,mjkp->ljkp", g, riemann_up)
    ricci = np.einsum("kjkp->jp", riemann_up)
    ricci = 0.5 * (ricci + ricci.T)
    scalar = float(np.einsum("jp,jp->", g_inv, ricci))
    return CurvatureBundle(
        riemann_up=riemann_up,
        riemann_down=riemann_down,
        ricci=ricci,
        scalar=scalar,
        metric=g,
        point=tuple(x),
    )


def sectional_curvature(
    spec: MetricSpec,
    point: Coords,
    x_vec,
    y_vec,
    t: float = 0.0,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Sectional curvature of the 2-plane spanned by ``x_vec`` and ``y_vec``.

    K(X, Y) = <R(X, Y)Y, X> / (|X|^2 |Y|^2 - <X, Y>^2), all inner products
    taken with the metric at the point. Invariant under any basis change of
    the plane, so scaling either vector leaves the result unchanged.

    Raises
    ------
    DegeneratePlaneError
        If the vectors are (numerically) linearly dependent.
    """
    x = as_coords(point)
    bundle = curvature_bundle(spec, x, t, tol=tol)
    g = bundle.metric
    xv = _vector_components(x_vec, spec.dim)
    yv = _vector_components(y_vec, spec.dim)

    xx = float(xv @ g @ xv)
    yy = float(yv @ g @ yv)
    xy = float(xv @ g @ yv)
    area2 = xx * yy - xy * xy
    if area2 <= tol.plane_ratio * xx * yy:
        raise DegeneratePlaneError("tangent vectors do not span a 2-plane")

    numer = float(np.einsum("ljkp,l,j,k,p->", bundle.riemann_down, xv, yv, xv, yv))
    return numer / area2


def gauss_curvature_2d(
    spec: MetricSpec,
    point: Coords,
    t: float = 0.0,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Gauss curvature R_1212 / det(g) of a 2-dimensional metric."""
    if spec.dim != 2:
        raise ValueError("gauss_curvature_2d requires a 2-dimensional metric")
    x = as_coords(point)
    bundle = curvature_bundle(spec, x, t, tol=tol)
    det = float(np.linalg.det(bundle.metric))
    return float(bundle.riemann_down[0, 1, 0, 1]) / det


def _field_jacobian(f: VectorField, x: np.ndarray, tol: Tolerances) -> np.ndarray:
    """J[j, k] = d_j f^k by central differences."""
    d = x.size
    h = tol.fd_step * np.maximum(1.0, np.abs(x))
    jac = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = h[j]
        hi = np.asarray(f(x + e), dtype=float)
        lo = np.asarray(f(x - e), dtype=float)
        jac[j] = (hi - lo) / (2.0 * h[j])
    return jac


def commutator(
    x_field: VectorField,
    y_field: VectorField,
    point: Coords,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TangentVector:
    """Lie bracket [X, Y]^k = X^j d_j Y^k - Y^j d_j X^k of two vector fields."""
    x = as_coords(point)
    xv = np.asarray(x_field(x), dtype=float)
    yv = np.asarray(y_field(x), dtype=float)
    jy = _field_jacobian(y_field, x, tol)
    jx = _field_jacobian(x_field, x, tol)
    out = xv @ jy - yv @ jx
    return TangentVector(components=tuple(out), point=tuple(x))


def covariant_derivative(
    x_vec,
    y_field: VectorField,
    point: Coords,
    spec: MetricSpec,
    t: float = 0.0,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TangentVector:
    """Levi-Civita covariant derivative (nabla_X Y)^k = X^j d_j Y^k + Gamma^k_{jm} X^j Y^m.

    On a flat chart (all Gamma = 0) this reduces to the plain directional
    derivative (X . nabla) Y.
    """
    x = as_coords(point)
    xv = _vector_components(x_vec, spec.dim)
    yv = np.asarray(y_field(x), dtype=float)
    jy = _field_jacobian(y_field, x, tol)
    gamma = christoffel(spec, x, t, tol=tol).gamma
    out = xv @ jy + np.einsum("kjm,j,m->k", gamma, xv, yv)
    return TangentVector(components=tuple(out), point=tuple(x))


# ---------------------------------------------------------------------------
# stock metrics (test oracles and benchmark inputs)
# ---------------------------------------------------------------------------


def euclidean_metric(dim: int) -> MetricSpec:
    """Identity metric on R^dim."""
    eye = np.eye(dim)
    return MetricSpec(dim=dim, evaluate=lambda x, t: eye.copy(), name=f"euclid{dim}")


def polar_metric() -> MetricSpec:
    """Flat plane in polar coordinates (r, theta): diag(1, r^2), with analytic partials."""

    def ev(x, t):
        return np.diag([1.0, x[0] ** 2])

    def par(x, t, k):
        out = np.zeros((2, 2))
        if k == 0:
            out[1, 1] = 2.0 * x[0]
        return out

    return MetricSpec(
        dim=2, evaluate=ev, domain=lambda x: x[0] > 0.0, partials=par, name="polar"
    )


def sphere_metric(radius: float = 1.0) -> MetricSpec:
    """Round 2-sphere of the given radius: diag(a^2, a^2 sin^2 x1), with analytic partials."""
    a2 = float(radius) ** 2

    def ev(x, t):
        return np.diag([a2, a2 * math.sin(x[0]) ** 2])

    def par(x, t, k):
        out = np.zeros((2, 2))
        if k == 0:
            out[1, 1] = 2.0 * a2 * math.sin(x[0]) * math.cos(x[0])
        return out

    return MetricSpec(
        dim=2,
        evaluate=ev,
        domain=lambda x: 0.0 < x[0] < math.pi,
        partials=par,
        name="sphere",
    )
