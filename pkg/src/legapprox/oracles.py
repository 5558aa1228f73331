"""Independent numerical oracles used to cross-check the constructions.

These deliberately use different algorithms than the construction path
(adaptive Gauss-Kronrod instead of oscillation-aligned fixed panels, finite
differences instead of analytic derivative evaluators), so that agreement
between the two routes is evidence rather than tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

TAU = 2.0 * math.pi


class QuadratureError(RuntimeError):
    """Adaptive integration failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    est_error: float
    evaluations: int


def quad_oracle(f: Callable, a: float, b: float, tol: float = 1e-12,
                points: Sequence[float] | None = None) -> QuadResult:
    """Adaptive panel-refinement integral of a scalar- or vector-valued f.

    Deterministic given inputs; raises QuadratureError when the refinement
    cap is hit before reaching the absolute tolerance.
    """
    if not b >= a:
        raise ValueError("need a <= b")
    if not tol > 0:
        raise ValueError("tol must be positive")
    value, err, info = quad_vec(f, a, b, epsabs=tol, epsrel=0.0,
                                points=points, full_output=True)
    # status 2 means "rounding-limited": fine as long as the estimate meets tol
    if err > tol or info.status not in (0, 2):
        raise QuadratureError(f"quadrature did not converge: est_error={err:.3e} > tol={tol:.3e}")
    return QuadResult(value=np.asarray(value, dtype=float), est_error=float(err),
                      evaluations=int(info.neval))


def fd_derivative(f: Callable, t, h: float):
    """Central difference (f(t+h) - f(t-h)) / (2h)."""
    if not h > 0:
        raise ValueError("h must be positive")
    t = np.asarray(t, dtype=float)
    return (np.asarray(f(t + h), dtype=float) - np.asarray(f(t - h), dtype=float)) / (2.0 * h)


def c0_distance(f: Callable, g: Callable, grid_size: int,
                domain: tuple[float, float] = (0.0, TAU)) -> float:
    """Grid maximum of |f - g| (Euclidean norm across components).

    A lower estimate of the true sup; consumers absorb the gap with a
    safety factor.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    t = np.linspace(domain[0], domain[1], grid_size)
    fv = np.asarray(f(t), dtype=float)
    gv = np.asarray(g(t), dtype=float)
    diff = fv - gv
    if diff.ndim == 1:
        return float(np.max(np.abs(diff)))
    return float(np.max(np.linalg.norm(diff, axis=-1)))


def endpoint_jet_defects(position: Callable, deriv: Callable | None = None,
                         order: int = 1, domain: tuple[float, float] = (0.0, TAU),
                         h: float = 1e-4) -> np.ndarray:
    """Per-derivative endpoint mismatch |jet(lo) - jet(hi)| for orders 0..order.

    Uses analytic derivative evaluators when given; otherwise central finite
    differences (the evaluators must accept points slightly outside the
    domain).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    lo, hi = domain
    defects = []
    ends = np.asarray([lo, hi], dtype=float)

    def _diff(vals):
        v = np.asarray(vals, dtype=float)
        d = v[0] - v[1]
        return float(np.max(np.abs(np.atleast_1d(d))))

    defects.append(_diff(position(ends)))
    if order >= 1:
        if deriv is not None:
            defects.append(_diff(deriv(ends)))
        else:
            defects.append(_diff(fd_derivative(position, ends, h)))
    for k in range(2, order + 1):
        # higher jets via repeated central differences of the best evaluator
        if deriv is not None:
            fk = _fd_power(deriv, k - 1, h)
        else:
            fk = _fd_power(position, k, h)
        defects.append(_diff(fk(ends)))
    return np.asarray(defects)


def _fd_power(f: Callable, k: int, h: float) -> Callable:
    if k <= 0:
        return f
    return _fd_power(lambda t: fd_derivative(f, t, h), k - 1, h)


def endpoint_jet_match(position: Callable, deriv: Callable | None = None,
                       order: int = 1, tol: float = 1e-9,
                       domain: tuple[float, float] = (0.0, TAU),
                       h: float = 1e-4) -> bool:
    """True when derivatives 0..order agree at both domain endpoints within tol."""
    return bool(np.all(endpoint_jet_defects(position, deriv, order, domain, h) <= tol))


def membership_scan(fam, eps: float, t_grid: np.ndarray, s_grid: np.ndarray) -> float:
    """Worst admissibility margin of the loop family over a (t, s) grid.

    Nonnegative result certifies (on the grid) that every loop stays inside
    the admissible derivative region at its parameter.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    u, v = fam.eval_grid(t_grid, s_grid)
    y = fam.target(t_grid)[:, 1][:, None]
    allow = eps * np.minimum(np.abs(u), u * u)
    margin = allow - np.abs(v - y * u)
    return float(np.min(margin))
