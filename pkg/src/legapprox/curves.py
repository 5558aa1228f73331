"""Parametrized space curves: evaluators, sampled data, mollification, norms.

Curves live on [0, 2*pi] by default (gluing uses short intervals around 0).
Evaluators are pure and vectorized; everything downstream assumes they can
be called slightly outside the nominal domain (mollified curves extend by
constant/periodic continuation, analytic ones are global formulas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

TAU = 2.0 * math.pi


@dataclass(frozen=True)
class ParamCurve:
    """Smooth curve t -> R^3 with a matching derivative evaluator.

    ``position`` and ``velocity`` are vectorized: a (m,) parameter array maps
    to an (m, 3) array.  ``periodic`` asserts that values and derivatives at
    the two domain endpoints agree.
    """

    position: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    periodic: bool = False
    domain: tuple[float, float] = (0.0, TAU)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = np.asarray(self.position(np.atleast_1d(t)), dtype=float)
        return out[0] if scalar else out

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = np.asarray(self.velocity(np.atleast_1d(t)), dtype=float)
        return out[0] if scalar else out

    def grid(self, size: int) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], size)


def curve_from_components(fx, fy, fz, dfx, dfy, dfz, periodic: bool = False,
                          domain: tuple[float, float] = (0.0, TAU)) -> ParamCurve:
    """Assemble a ParamCurve from scalar component formulas."""

    def position(t):
        t = np.asarray(t, dtype=float)
        return np.stack([fx(t) * np.ones_like(t), fy(t) * np.ones_like(t),
                         fz(t) * np.ones_like(t)], axis=-1)

    def velocity(t):
        t = np.asarray(t, dtype=float)
        return np.stack([dfx(t) * np.ones_like(t), dfy(t) * np.ones_like(t),
                         dfz(t) * np.ones_like(t)], axis=-1)

    return ParamCurve(position, velocity, periodic=periodic, domain=domain)


def helix_target(pitch: int = 5) -> ParamCurve:
    """The demo helix t -> (t, cos(k t), sin(k t))."""
    k = pitch
    return curve_from_components(
        lambda t: t, lambda t: np.cos(k * t), lambda t: np.sin(k * t),
        lambda t: np.ones_like(t), lambda t: -k * np.sin(k * t), lambda t: k * np.cos(k * t))


def parking_target() -> ParamCurve:
    """Pure sideways translation t -> (0, 0, t): the parallel-parking core."""
    z = lambda t: np.zeros_like(t)
    return curve_from_components(z, z, lambda t: t, z, z, lambda t: np.ones_like(t))


def circle_target() -> ParamCurve:
    """Closed unit circle t -> (cos t, sin t, 0)."""
    return curve_from_components(
        lambda t: np.cos(t), lambda t: np.sin(t), lambda t: np.zeros_like(t),
        lambda t: -np.sin(t), lambda t: np.cos(t), lambda t: np.zeros_like(t),
        periodic=True)


@dataclass(frozen=True)
class SampledCurve:
    """Ordered curve samples (t_i, p_i), the C^0 ingestion form.

    Raw samples carry no usable derivative; consumers must mollify first.
    """

    t: np.ndarray
    points: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        p = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "points", p)
        if t.ndim != 1 or p.ndim != 2 or p.shape != (len(t), 3):
            raise ValueError("need t of shape (m,) and points of shape (m, 3)")
        if len(t) < 4:
            raise ValueError("need at least 4 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample parameters must be strictly increasing")
        if t[0] < -1e-12 or t[-1] > TAU + 1e-12:
            raise ValueError("sample parameters must lie in [0, 2*pi]")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise ValueError("samples must be finite")


def _bump_kernel(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


def _bump_kernel_deriv(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    q = 1.0 - ui * ui
    out[inside] = np.exp(-1.0 / q) * (-2.0 * ui / (q * q))
    return out


def mollify(raw: SampledCurve, bandwidth: float) -> ParamCurve:
    """Smooth a sampled curve by convolving its linear interpolant with a bump.

    The kernel is a compactly supported unit-mass bump of half-width
    ``bandwidth``; non-periodic inputs are extended by their boundary value,
    periodic ones by wrapping.  The sup-distance to the interpolant is at
    most its modulus of continuity at the bandwidth.

    The convolution integral is discretized on quadrature nodes fixed in the
    sample coordinate (not moving with t), so the returned evaluators are
    smooth in t and ``velocity`` is the exact derivative of ``position``.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    h = float(bandwidth)
    knots = raw.t
    vals = raw.points
    if raw.periodic:
        knots = np.concatenate([knots - TAU, knots, knots + TAU])
        vals = np.concatenate([vals, vals, vals], axis=0)
    # constant extension beyond the samples, wide enough for padded domains
    reach = 2.0 * h + 1.0
    knots = np.concatenate([[knots[0] - reach], knots, [knots[-1] + reach]])
    vals = np.concatenate([vals[:1], vals, vals[-1:]], axis=0)

    # piecewise integration grid: knot intervals refined to at most h/3 so the
    # kernel is resolved on every piece
    edges = [knots[:1]]
    for a, b in zip(knots[:-1], knots[1:]):
        splits = max(1, int(math.ceil((b - a) / (h / 3.0))))
        edges.append(np.linspace(a, b, splits + 1)[1:])
    edges = np.concatenate(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    gl_nodes, gl_weights = leggauss(8)
    S = mid[:, None] + half[:, None] * gl_nodes[None, :]        # (P, 8)
    W = half[:, None] * gl_weights[None, :]                     # (P, 8)
    PV = np.empty(S.shape + (3,))
    for j in range(3):
        PV[..., j] = np.interp(S, knots, vals[:, j])
    WPV = W[..., None] * PV

    # any kernel window [t-h, t+h] intersects at most block_len pieces
    min_piece = float(np.min(np.diff(edges)))
    block_len = min(len(mid), int(math.ceil(2.0 * h / min_piece)) + 3)
    lo_valid = float(edges[0] + h)
    hi_valid = float(edges[-1] - h)

    def _blocks(t):
        t = np.clip(np.asarray(t, dtype=float), lo_valid, hi_valid)
        i0 = np.searchsorted(edges, t - h, side="right") - 1
        i0 = np.clip(i0, 0, len(mid) - block_len)
        idx = i0[:, None] + np.arange(block_len)[None, :]
        u = (t[:, None, None] - S[idx]) / h
        return idx, u

    def position(t):
        idx, u = _blocks(t)
        k = _bump_kernel(u)
        num = np.einsum("mpq,mpqd->md", k, WPV[idx])
        den = np.einsum("mpq,mpq->m", k, W[idx])
        return num / den[:, None]

    def velocity(t):
        idx, u = _blocks(t)
        k = _bump_kernel(u)
        kd = _bump_kernel_deriv(u) / h
        num = np.einsum("mpq,mpqd->md", k, WPV[idx])
        den = np.einsum("mpq,mpq->m", k, W[idx])
        dnum = np.einsum("mpq,mpqd->md", kd, WPV[idx])
        dden = np.einsum("mpq,mpq->m", kd, W[idx])
        return (dnum * den[:, None] - num * dden[:, None]) / (den ** 2)[:, None]

    return ParamCurve(position, velocity, periodic=raw.periodic)


def c0_norm(curve: ParamCurve, grid_size: int) -> float:
    """Grid maximum of |curve(t)|: a lower estimate of the true sup norm."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    t = curve.grid(grid_size)
    return float(np.max(np.linalg.norm(curve(t), axis=-1)))


def c1_norm(curve: ParamCurve, grid_size: int) -> float:
    """Grid estimate of sup|curve| + sup|curve'|."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    t = curve.grid(grid_size)
    return float(np.max(np.linalg.norm(curve(t), axis=-1))
                 + np.max(np.linalg.norm(curve.deriv(t), axis=-1)))
