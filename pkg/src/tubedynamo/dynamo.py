"""Lyapunov spectra, dynamo-action criteria, magnetic growth factors and the
diffusive dynamo eigenvalue.

Two transcription inconsistencies of the underlying model are kept visible
rather than resolved: the dynamo threshold compares |omega1 tan(theta)| with
|vr/r| while the tube spectrum has lambda2 = 2 vr/r (both margins are
reported), and the axial growth exponent carries an extra factor of vr
relative to lambda3. Output tables flag both.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import SingularityError
from .ricci import tube_lyapunov_spectrum
from .tube import FlowField, FrenetFrame

__all__ = [
    "LyapunovSpectrum",
    "DynamoVerdict",
    "FieldGrowth",
    "CLSpectrumInput",
    "finite_time_lyapunov",
    "infinite_lyapunov",
    "metric_from_lyapunov",
    "dynamo_constraint",
    "field_growth",
    "chicone_latushkin_lambda",
    "ideal_lambda",
    "fast_dynamo_condition",
    "ricci_to_lyapunov",
    "eps_from_reynolds",
]

LAMBDA2_CONVENTION_FLAG = "lambda2-convention-mismatch"
BTHETA_RATE_FLAG = "btheta-rate-quarter-of-lambda2"
BS_RATE_FLAG = "bs-rate-extra-vr-factor"


def _safe_exp(x: float) -> float:
    # growth exponents near the clamped tangent pole can exceed float range
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Stretching factors Lambda_i with their finite-time exponents over a horizon.

    lambdas_i = ln(Lambda_i) / (2 t) and gammas_i = -lambdas_i, exactly.
    """

    Lambdas: tuple[float, ...]
    lambdas: tuple[float, ...]
    gammas: tuple[float, ...]
    horizon: float


@dataclass(frozen=True)
class DynamoVerdict:
    """Stretch-versus-contraction verdict with numeric margins.

    ``margin`` is |omega1 tan(theta)| - |vr/r| (the printed threshold);
    ``margin_spectrum`` uses |lambda2| = |2 vr/r| from the tube spectrum.
    ``satisfied`` tracks ``margin >= 0``.
    """

    satisfied: bool
    margin: float
    stretch_ok: bool
    contract_ok: bool
    margin_spectrum: float
    flags: tuple[str, ...]


@dataclass(frozen=True)
class FieldGrowth:
    """Azimuthal and axial magnetic growth exponents with their amplifications."""

    rate_theta: float
    rate_s: float
    amp_theta: float
    amp_s: float
    horizon: float
    flags: tuple[str, ...]


@dataclass(frozen=True)
class CLSpectrumInput:
    """Validated inputs of the diffusive-spectrum evaluation."""

    epsilon: float
    kappa: float
    re_m: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must involve no negative resistivity")
        if self.re_m <= 0:
            raise ValueError("magnetic Reynolds number must be positive")


def finite_time_lyapunov(Lambdas: Sequence[float], t: float) -> LyapunovSpectrum:
    """Finite-time exponents lambda_i = ln(Lambda_i) / (2 t) for a horizon t > 0."""
    if t <= 0:
        raise ValueError("finite-time horizon must be positive")
    lams = []
    for lam in Lambdas:
        if lam <= 0:
            raise ValueError(f"stretching factors must be positive, got {lam}")
        lams.append(math.log(lam) / (2.0 * t))
    return LyapunovSpectrum(
        Lambdas=tuple(float(v) for v in Lambdas),
        lambdas=tuple(lams),
        gammas=tuple(-v for v in lams),
        horizon=float(t),
    )


def infinite_lyapunov(
    times: Sequence[float],
    Lambdas: Sequence[float],
) -> tuple[float, float]:
    """Estimate the infinite-time exponent lim ln(Lambda)/(2t).

    The estimate is the finite-time value at the largest t. The error bar is
    |slope| * t_last with the slope of lambda(t) fitted over the last three
    samples, i.e. the drift the estimate could still accumulate over another
    horizon of the same length.
    """
    t = np.asarray(times, dtype=float)
    lam_fac = np.asarray(Lambdas, dtype=float)
    if t.size != lam_fac.size:
        raise ValueError("times and Lambdas must have matching lengths")
    if t.size < 3:
        raise ValueError("infinite_lyapunov needs at least three samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    if np.any(lam_fac <= 0) or np.any(t <= 0):
        raise ValueError("samples must have positive t and Lambda")
    finite = np.log(lam_fac) / (2.0 * t)
    slope = np.polyfit(t[-3:], finite[-3:], 1)[0]
    return float(finite[-1]), float(abs(slope) * t[-1])


def metric_from_lyapunov(
    Lambdas: Sequence[float],
    frame: Union[FrenetFrame, np.ndarray, Sequence[Sequence[float]]],
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Metric g = sum_i Lambda_i e_i e_i^T from stretching factors and an
    orthonormal frame (rows e_i). The eigenvalues of g are exactly the Lambda_i.
    """
    lam = np.asarray(Lambdas, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("stretching factors must be positive")
    e = frame.matrix if isinstance(frame, FrenetFrame) else np.asarray(frame, dtype=float)
    if e.shape != (lam.size, lam.size):
        raise ValueError(f"frame shape {e.shape} does not match {lam.size} factors")
    gram = e @ e.T
    if np.max(np.abs(gram - np.eye(lam.size))) > tol.frame_gram:
        raise ValueError("frame is not orthonormal (Gram deviation above tolerance)")
    return e.T @ np.diag(lam) @ e


def dynamo_constraint(
    flow: FlowField,
    theta: float,
    r: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DynamoVerdict:
    """Dynamo-action verdict |omega1 tan(theta)| >= |vr / r|.

    stretch_ok / contract_ok report the sign pattern of the tube spectrum
    (lambda3 > 0, lambda2 < 0) at the same inputs.
    """
    if r <= 0:
        raise ValueError("dynamo constraint needs r > 0")
    if abs(math.cos(theta)) < tol.tangent_cos:
        raise SingularityError("tan(theta) singular at theta = pi/2 (mod pi)")
    _, lam2, lam3 = tube_lyapunov_spectrum(flow, r, theta, tol=tol)
    twist_term = abs(flow.omega1 * math.tan(theta))
    margin = twist_term - abs(flow.vr_at(r) / r)
    margin_spectrum = twist_term - abs(lam2)
    return DynamoVerdict(
        satisfied=margin >= 0.0,
        margin=float(margin),
        stretch_ok=lam3 > 0.0,
        contract_ok=lam2 < 0.0,
        margin_spectrum=float(margin_spectrum),
        flags=(LAMBDA2_CONVENTION_FLAG,),
    )


def field_growth(
    flow: FlowField,
    theta: float,
    r: float,
    t: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FieldGrowth:
    """Magnetic growth exponents, transcribed literally.

    rate_theta = vr / r and rate_s = vr / r + omega1 vr tan(theta); the
    amplification over the horizon is exp(rate * t). The rate conventions
    are internally inconsistent with the tube spectrum (see module flags).
    """
    if r <= 0:
        raise ValueError("field growth needs r > 0")
    if abs(math.cos(theta)) < tol.tangent_cos:
        raise SingularityError("tan(theta) singular at theta = pi/2 (mod pi)")
    vr = flow.vr_at(r)
    rate_theta = vr / r
    rate_s = vr / r + flow.omega1 * vr * math.tan(theta)
    return FieldGrowth(
        rate_theta=float(rate_theta),
        rate_s=float(rate_s),
        amp_theta=_safe_exp(rate_theta * t),
        amp_s=_safe_exp(rate_s * t),
        horizon=float(t),
        flags=(BTHETA_RATE_FLAG, BS_RATE_FLAG),
    )


def chicone_latushkin_lambda(eps: float, kappa: float) -> complex:
    """Diffusive dynamo eigenvalue (1/2)[-eps (1 + kappa^2) + sqrt(eps^2 (1 - kappa^2)^2 - 4 kappa)].

    The square root is the principal complex branch, so the value is real for
    sufficiently negative kappa and gains an imaginary part otherwise. The
    real part is the growth rate.
    """
    if eps < 0:
        raise ValueError("resistive coefficient eps must be non-negative")
    disc = eps * eps * (1.0 - kappa * kappa) ** 2 - 4.0 * kappa
    return 0.5 * (-eps * (1.0 + kappa * kappa) + cmath.sqrt(complex(disc, 0.0)))


def ideal_lambda(kappa: float) -> complex:
    """Zero-resistivity limit of the diffusive eigenvalue.

    Equals i sqrt(kappa) for kappa >= 0 and the positive real sqrt(-kappa)
    for kappa < 0 (the principal branch of sqrt(-4 kappa) / 2, matching the
    eps -> 0 limit of :func:`chicone_latushkin_lambda`).
    """
    if kappa >= 0:
        return complex(0.0, math.sqrt(kappa))
    return complex(math.sqrt(-kappa), 0.0)


def fast_dynamo_condition(re_m: float, kappa: float) -> bool:
    """Fast-dynamo test: negative curvature kappa with Re_m > sqrt(-kappa)."""
    if re_m <= 0:
        raise ValueError("magnetic Reynolds number must be positive")
    return kappa < 0 and re_m > math.sqrt(-kappa)


def ricci_to_lyapunov(ricci_lambdas: Sequence[float]) -> tuple[np.ndarray, tuple[int, ...]]:
    """Map Ricci eigenvalues to gamma_i = -lambda_i.

    Returns the gammas together with the indices of any lambda_i > 0, which
    violate the non-positive-spectrum assumption behind the mapping (reported,
    not raised: the stretching direction of a working dynamo is exactly such a
    violation).
    """
    lam = np.asarray(ricci_lambdas, dtype=float)
    flagged = tuple(int(i) for i in np.nonzero(lam > 0.0)[0])
    return -lam, flagged


def eps_from_reynolds(re_m: float) -> float:
    """Optional identification eps = 1 / Re_m between the two resistivity inputs."""
    if re_m <= 0:
        raise ValueError("magnetic Reynolds number must be positive")
    return 1.0 / re_m
