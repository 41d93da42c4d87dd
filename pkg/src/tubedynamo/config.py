"""Numerical tolerances, collected in one record.

Every operation takes these as an optional keyword so individual calls can
override a knob without touching global state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Tolerances:
    # Central-difference step scale for first derivatives: h_i = fd_step * max(1, |x_i|).
    fd_step: float = _EPS ** (1.0 / 3.0)
    # Base step scale for second-derivative stencils (one Richardson level).
    # eps**(1/3) would lose ~5 digits to roundoff in second differences, so the
    # second-derivative step balances O(h^4) truncation against eps/h^2 roundoff.
    fd2_step: float = _EPS ** (1.0 / 6.0)
    # Positive-definiteness: smallest eigenvalue must exceed this fraction of the largest.
    metric_eig_ratio: float = 1e-12
    # Degenerate 2-plane: S(X,Y) below this fraction of |X|^2 |Y|^2.
    plane_ratio: float = 1e-12
    # Relative tolerance of the composite-Simpson twist quadrature.
    quadrature_rtol: float = 1e-10
    # Allowed Gram deviation of an orthonormal frame.
    frame_gram: float = 1e-10
    # |cos(theta)| below this counts as the tangent singularity.
    tangent_cos: float = 1e-12
    # Generalized eigenproblem: off-diagonal reduction target of the Jacobi sweeps.
    jacobi_off: float = 1e-14


DEFAULT_TOLERANCES = Tolerances()
