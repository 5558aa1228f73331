"""Estimator-style front end so the construction composes with sklearn tooling.

``LegendrianApproximator.fit`` accepts either a ParamCurve or raw curve
samples (columns t, x, y, z); sampled input is mollified first.  ``predict``
evaluates the fitted Legendrian curve.  ``Mollifier`` is the smoothing step
alone, usable inside a Pipeline.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .contact import ContactModel, legendrian_residual
from .convex_integration import approximate_closed, approximate_open
from .curves import ParamCurve, SampledCurve, mollify


def validate_curve_samples(X) -> tuple[np.ndarray, np.ndarray]:
    """Check and split an (m, 4) sample array into parameters and positions."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 4:
        raise ValueError("expected samples of shape (m, 4) with columns t, x, y, z")
    if X.shape[0] < 4:
        raise ValueError("need at least 4 samples")
    if not np.all(np.isfinite(X)):
        raise ValueError("samples must be finite")
    t = X[:, 0]
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample parameters must be strictly increasing")
    return t, X[:, 1:]


def default_bandwidth(t: np.ndarray) -> float:
    return 4.0 * float(np.median(np.diff(t)))


class Mollifier(TransformerMixin, BaseEstimator):
    """Smooth raw curve samples by bump-kernel convolution.

    transform() re-evaluates the smoothed curve at the input parameters, so
    the output has the same (m, 4) layout as the input.
    """

    def __init__(self, bandwidth: float | None = None, periodic: bool = False):
        self.bandwidth = bandwidth
        self.periodic = periodic

    def fit(self, X, y=None):
        t, pts = validate_curve_samples(X)
        bw = self.bandwidth if self.bandwidth is not None else default_bandwidth(t)
        self.curve_ = mollify(SampledCurve(t, pts, periodic=self.periodic), bw)
        self.bandwidth_ = bw
        return self

    def transform(self, X):
        check_is_fitted(self, "curve_")
        t, _ = validate_curve_samples(X)
        return np.column_stack([t, self.curve_(t)])


class LegendrianApproximator(BaseEstimator):
    """Fit a Legendrian curve C^0-close to a target curve.

    Parameters mirror the construction: ``eps`` is the slope play, ``r``/``n``
    optionally pin the loop amplitude and oscillation count, ``closed``
    selects the closed-curve variant (the target must be periodic).
    """

    def __init__(self, eps: float = 0.1, closed: bool = False,
                 r: float | None = None, n: int | None = None,
                 bandwidth: float | None = None, grid_size: int = 400,
                 safety: float = 1.25):
        self.eps = eps
        self.closed = closed
        self.r = r
        self.n = n
        self.bandwidth = bandwidth
        self.grid_size = grid_size
        self.safety = safety

    def fit(self, X, y=None):
        if isinstance(X, ParamCurve):
            target = X
        else:
            t, pts = validate_curve_samples(np.asarray(X))
            bw = self.bandwidth if self.bandwidth is not None else default_bandwidth(t)
            target = mollify(SampledCurve(t, pts, periodic=self.closed), bw)
        build = approximate_closed if self.closed else approximate_open
        self.target_ = target
        self.curve_ = build(target, self.eps, r=self.r, n=self.n,
                            grid_size=self.grid_size, safety=self.safety)
        self.params_ = self.curve_.params
        report = legendrian_residual(self.curve_.as_param_curve(),
                                     ContactModel.STANDARD3, 2001)
        self.report_ = dict(self.curve_.meta,
                            residual_max=report.max_abs,
                            r=self.params_.r, n=self.params_.n)
        return self

    def predict(self, T) -> np.ndarray:
        """Evaluate the fitted curve: (m,) parameters -> (m, 3) values (a, b, c)."""
        check_is_fitted(self, "curve_")
        T = np.asarray(T, dtype=float)
        if T.ndim == 2 and T.shape[1] == 1:
            T = T[:, 0]
        if T.ndim != 1:
            raise ValueError("expected a 1-d array of parameter values")
        lo, hi = self.curve_.domain
        if np.any(T < lo - 1e-9) or np.any(T > hi + 1e-9):
            raise ValueError(f"parameters outside the curve domain [{lo:.6g}, {hi:.6g}]")
        return self.curve_.eval(T)

    def transform(self, T) -> np.ndarray:
        return self.predict(T)
