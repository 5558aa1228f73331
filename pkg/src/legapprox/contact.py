"""The two concrete contact models and Legendrian residual checks.

Standard model on R^3: the plane field is the kernel of dz - y dx, and a
curve (a, b, c) is Legendrian iff c' = b a'.  Car model on S^1 x R^2 with
coordinates (phi, a, c): kernel of sin(phi) da - cos(phi) dc, i.e. the
rolling constraint a' sin(phi) = c' cos(phi).  The two are linked by
b = tan(phi).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .curves import ParamCurve


class ContactModel(enum.Enum):
    STANDARD3 = "standard3"  # components read as (a, b, c)
    CAR = "car"              # components read as (phi, a, c)


@dataclass(frozen=True)
class ResidualReport:
    """Gridded Legendrian residual; max_abs is the grid maximum of |residual|."""

    grid: np.ndarray
    residuals: np.ndarray
    max_abs: float


def legendrian_residual(curve: ParamCurve, model: ContactModel,
                        grid_size: int = 10_000) -> ResidualReport:
    """Pointwise contact-form pairing with the curve's velocity.

    Zero residual (up to round-off) certifies the curve is Legendrian for
    the chosen model.  Residuals are reported raw, not normalized by speed.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    t = curve.grid(grid_size)
    p = curve(t)
    d = curve.deriv(t)
    if model is ContactModel.STANDARD3:
        res = d[:, 2] - p[:, 1] * d[:, 0]
    elif model is ContactModel.CAR:
        res = np.sin(p[:, 0]) * d[:, 1] - np.cos(p[:, 0]) * d[:, 2]
    else:
        raise ValueError(f"unsupported contact model: {model}")
    return ResidualReport(grid=t, residuals=res, max_abs=float(np.max(np.abs(res))))


def car_from_standard(curve) -> ParamCurve:
    """Translate a Legendrian curve (a, b, c) to an admissible car motion.

    Returns (phi, a, c) with phi = arctan(b) on the principal branch
    (|phi| < pi/2, forward-facing motion); the car residual of the result is
    at round-off level whenever c' = b a'.
    """
    pc = curve.as_param_curve() if hasattr(curve, "as_param_curve") else curve

    def position(t):
        p = pc.position(t)
        return np.stack([np.arctan(p[..., 1]), p[..., 0], p[..., 2]], axis=-1)

    def velocity(t):
        p = pc.position(t)
        d = pc.velocity(t)
        dphi = d[..., 1] / (1.0 + p[..., 1] ** 2)
        return np.stack([dphi, d[..., 0], d[..., 2]], axis=-1)

    return ParamCurve(position, velocity, periodic=pc.periodic, domain=pc.domain)
