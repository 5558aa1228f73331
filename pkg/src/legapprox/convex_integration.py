"""Legendrian approximation of curves in standard contact R^3.

Given a smooth target (x, y, z) on [0, 2*pi], the construction integrates a
fast-oscillating family of plane loops whose pointwise average matches
(x', z').  The loops live inside the admissible derivative region

    R_{t,eps} = {(u, v) : |v - y(t) u| <= eps * min(|u|, u^2)},

which forces the slope c'/a' of the output to track y within eps, while the
averaging property forces (a, c) to track (x, z) at rate 1/n.  The slope
component b is always evaluated through its closed form, never as the
quotient c'/a' (a' vanishes at isolated cusp points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import ParamCurve, TAU
from .oracles import membership_scan, quad_oracle
from .quadrature import PanelCumulativeIntegral, aligned_edges

DEFAULT_SAFETY = 1.25
# closed-curve coupling n ~ kappa * r^2, as in the helix demo (n = 2/9 r^2)
CLOSED_FREQ_COUPLING = 2.0 / 9.0

FOUR_PI_SQ = 4.0 * math.pi ** 2


class ParameterSearchError(RuntimeError):
    """No admissible construction parameter found within the search caps."""


@dataclass(frozen=True)
class AmpleSet:
    """Admissible derivative region at one parameter value.

    The region is pinched quadratically at the origin and opens into a cone
    of slope-play eps around the line v = y_t * u; its convex hull fills the
    whole plane, which is what makes barycentric loop constructions work.
    """

    y_t: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


def ample_contains(ample: AmpleSet, u, v):
    """Membership test with signed margin (negative outside).

    margin = eps * min(|u|, u^2) - |v - y_t * u|
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    margin = ample.eps * np.minimum(np.abs(u), u * u) - np.abs(v - ample.y_t * u)
    return margin >= 0, margin


@dataclass(frozen=True)
class LoopFamily:
    """The explicit loop family over a target curve.

    gamma_1(t, s) = r cos s + x'(t)
    gamma_2(t, s) = gamma_1 * (y(t) + K(t) * gamma_1),
        K(t) = 2 (z'(t) - y(t) x'(t)) / (r^2 + 2 x'(t)^2)

    For every r > 0 the s-average over a full period is (x'(t), z'(t)); for
    r large enough the loop lies in the admissible region at every t.
    """

    target: ParamCurve
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("amplitude r must be positive")

    def coeffs(self, t: np.ndarray):
        """(x', y, K) at the given parameters."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.target(t)
        d = self.target.deriv(t)
        dx, y, dz = d[..., 0], p[..., 1], d[..., 2]
        K = 2.0 * (dz - y * dx) / (self.r * self.r + 2.0 * dx * dx)
        return dx, y, K

    def eval(self, t, s):
        """Pointwise loop values; t and s broadcast together."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        shape = t.shape
        dx, y, K = self.coeffs(t.ravel())
        g1 = self.r * np.cos(s.ravel()) + dx
        g2 = g1 * (y + K * g1)
        return g1.reshape(shape), g2.reshape(shape)

    def eval_grid(self, t_grid: np.ndarray, s_grid: np.ndarray):
        """Loop values on the outer grid t_grid x s_grid, target evaluated once per t."""
        dx, y, K = self.coeffs(t_grid)
        g1 = self.r * np.cos(np.asarray(s_grid, dtype=float))[None, :] + dx[:, None]
        g2 = g1 * (y[:, None] + K[:, None] * g1)
        return g1, g2

    def ds_grid(self, t_grid: np.ndarray, s_grid: np.ndarray):
        """Analytic s-partials on the outer grid."""
        dx, y, K = self.coeffs(t_grid)
        s = np.asarray(s_grid, dtype=float)
        g1 = self.r * np.cos(s)[None, :] + dx[:, None]
        dg1 = -self.r * np.sin(s)[None, :] * np.ones_like(dx)[:, None]
        dg2 = dg1 * (y[:, None] + 2.0 * K[:, None] * g1)
        return dg1, dg2


def loop_eval(fam: LoopFamily, t, s):
    """Loop value (gamma_1, gamma_2) at (t, s)."""
    return fam.eval(t, s)


def loop_barycenter_check(fam: LoopFamily, t: float, quad_tol: float = 1e-11):
    """Quadrature mean of the loop at fixed t against (x'(t), z'(t)).

    Returns (mean, defect); the mean is computed by the independent adaptive
    oracle, not by the construction's panel quadrature.
    """
    if not quad_tol > 0:
        raise ValueError("quad_tol must be positive")

    def integrand(s):
        g1, g2 = fam.eval(t, s)
        return np.stack([np.asarray(g1), np.asarray(g2)], axis=-1)

    res = quad_oracle(integrand, 0.0, TAU, tol=quad_tol)
    mean = res.value / TAU
    d = fam.target.deriv(t)
    expected = np.array([d[0], d[2]])
    defect = float(np.linalg.norm(mean - expected))
    return mean, defect


def gamma_c1_estimate(fam: LoopFamily, grid_size: int = 256, fd_h: float = 1e-3) -> float:
    """Conservative grid estimate of the loop family's C^1 size.

    Sums the grid maxima of |gamma|, |d_t gamma| and |d_s gamma|; the
    t-partial is a central difference so targets only need first-derivative
    evaluators.
    """
    lo, hi = fam.target.domain
    tg = np.linspace(lo, hi, grid_size + 1)
    sg = np.linspace(0.0, TAU, 257)
    g1, g2 = fam.eval_grid(tg, sg)
    pos = float(np.max(np.hypot(g1, g2)))
    d1, d2 = fam.ds_grid(tg, sg)
    ds = float(np.max(np.hypot(d1, d2)))
    g1p, g2p = fam.eval_grid(tg + fd_h, sg)
    g1m, g2m = fam.eval_grid(tg - fd_h, sg)
    dt = float(np.max(np.hypot((g1p - g1m) / (2 * fd_h), (g2p - g2m) / (2 * fd_h))))
    return pos + dt + ds


def choose_radius(target: ParamCurve, eps: float, grid_size: int = 400,
                  safety: float = DEFAULT_SAFETY, r_floor: float = 1.0,
                  scan_size: int = 400) -> float:
    """Smallest loop amplitude whose loops stay admissible at slope-play eps.

    Solves the sufficient condition 2 M max(1, r + X) / r^2 <= eps / safety
    (M = sup|z' - y x'|, X = sup|x'|, grid estimates) by doubling and
    bisection, then certifies membership with a full (t, s) grid scan.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    t = target.grid(grid_size)
    p = target(t)
    d = target.deriv(t)
    M = float(np.max(np.abs(d[:, 2] - p[:, 1] * d[:, 0])))
    X = float(np.max(np.abs(d[:, 0])))

    if M < 1e-14:
        r = r_floor
    else:
        bound = eps / safety

        def satisfies(r):
            return 2.0 * M * max(1.0, r + X) / (r * r) <= bound

        hi = max(r_floor, 1.0)
        doublings = 0
        while not satisfies(hi):
            hi *= 2.0
            doublings += 1
            if doublings > 200:
                raise ParameterSearchError("amplitude search exceeded iteration cap")
        if satisfies(r_floor):
            r = r_floor
        else:
            lo = hi / 2.0 if doublings else r_floor
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if satisfies(mid):
                    hi = mid
                else:
                    lo = mid
            r = hi

    fam = LoopFamily(target, r)
    lo_d, hi_d = target.domain
    margin = membership_scan(fam, eps, np.linspace(lo_d, hi_d, scan_size),
                             np.linspace(0.0, TAU, scan_size))
    if margin < -1e-12:
        raise ParameterSearchError(
            f"membership scan failed at r={r:.6g}: worst margin {margin:.3e}")
    return r


def choose_frequency(target: ParamCurve, fam: LoopFamily, eps: float,
                     grid_size: int = 256, safety: float = DEFAULT_SAFETY,
                     kind: str = "open", gamma_c1: float | None = None) -> int:
    """Oscillation count guaranteeing the C^0 position bound is below eps.

    n = ceil(safety * 4 pi^2 * C / eps) with C the conservative C^1 grid
    estimate of the loop family (factor 8 pi^2 for closed curves, where the
    frequency is additionally coupled to the amplitude as n >= 2/9 r^2).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    chat = gamma_c1_estimate(fam, grid_size) if gamma_c1 is None else gamma_c1
    factor = FOUR_PI_SQ if kind == "open" else 2.0 * FOUR_PI_SQ
    n = max(1, int(math.ceil(safety * factor * chat / eps)))
    if kind == "closed":
        n = max(n, int(math.ceil(CLOSED_FREQ_COUPLING * fam.r ** 2)))
    return n


@dataclass(frozen=True)
class ApproxParams:
    """Construction parameters: slope play eps, loop amplitude r, frequency n."""

    eps: float
    r: float
    n: int

    def __post_init__(self):
        if not (self.eps > 0 and self.r > 0 and self.n >= 1):
            raise ValueError("need eps > 0, r > 0, n >= 1")


def error_bound(params: ApproxParams, gamma_c1: float, kind: str = "open") -> float:
    """A-priori sup bound on |(a,c) - (x,z)|: 4 pi^2 C / n (8 pi^2 C / n closed)."""
    if gamma_c1 < 0:
        raise ValueError("gamma_c1 must be nonnegative")
    factor = FOUR_PI_SQ if kind == "open" else 2.0 * FOUR_PI_SQ
    return factor * gamma_c1 / params.n


class _LazyCumulative:
    """Defers the panel prefix build until position values are first needed."""

    def __init__(self, fun, edges, order=12):
        self._fun = fun
        self._edges = edges
        self._order = order
        self._cum = None

    def __call__(self, t):
        if self._cum is None:
            self._cum = PanelCumulativeIntegral(self._fun, self._edges, self._order)
        return self._cum(t)


class LegendrianCurve:
    """A constructed Legendrian curve (a, b, c) with analytic derivatives.

    c'(t) = b(t) a'(t) holds identically: b and c' share the same float
    subexpressions, so the residual is at round-off level on any grid.
    """

    def __init__(self, a, b, c, da, dc, db=None, *, params: ApproxParams,
                 kind: str, meta: dict | None = None,
                 domain: tuple[float, float] = (0.0, TAU)):
        self.a, self.b, self.c = a, b, c
        self.da, self.dc = da, dc
        self.db = db if db is not None else self._fd_db
        self.params = params
        self.kind = kind
        self.meta = dict(meta or {})
        self.domain = domain

    def _fd_db(self, t, h: float = 1e-6):
        t = np.asarray(t, dtype=float)
        return (self.b(t + h) - self.b(t - h)) / (2.0 * h)

    def eval(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([self.a(t), self.b(t), self.c(t)], axis=-1)

    def deriv(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([self.da(t), self.db(t), self.dc(t)], axis=-1)

    def as_param_curve(self) -> ParamCurve:
        return ParamCurve(self.eval, self.deriv, periodic=(self.kind == "closed"),
                          domain=self.domain)

    def grid(self, size: int) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], size)


def approximate_open(target: ParamCurve, eps: float, *, r: float | None = None,
                     n: int | None = None, grid_size: int = 400,
                     safety: float = DEFAULT_SAFETY, pad: float = 0.15,
                     order: int = 12) -> LegendrianCurve:
    """Legendrian curve C^0-close to an open target.

    (a, c) is the cumulative integral of the loop evaluated along the fast
    diagonal u -> gamma(u, n u); b is the closed-form slope.  Guarantees
    sup|b - y| <= eps (loop membership) and sup|(a,c) - (x,z)| <= the
    4 pi^2 C / n bound.  Pass r and n to pin the construction parameters.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if r is None:
        r = choose_radius(target, eps, grid_size=grid_size, safety=safety)
    fam = LoopFamily(target, r)
    chat = gamma_c1_estimate(fam)
    if n is None:
        n = choose_frequency(target, fam, eps, safety=safety, kind="open",
                             gamma_c1=chat)
    params = ApproxParams(eps=eps, r=float(r), n=int(n))

    lo, hi = target.domain
    p0 = target(lo)
    x0, z0 = float(p0[0]), float(p0[2])

    def slope_parts(t):
        t = np.asarray(t, dtype=float)
        dx, y, K = fam.coeffs(t)
        g1 = params.r * np.cos(params.n * t) + dx
        slope = y + K * g1
        return g1, slope

    def path(u):
        g1, slope = slope_parts(u)
        return np.stack([g1, g1 * slope], axis=-1)

    edges = aligned_edges(lo, hi, params.n, pad=pad)
    cum = _LazyCumulative(path, edges, order)

    def a(t):
        return x0 + (cum(t)[..., 0] - cum(lo)[..., 0])

    def c(t):
        return z0 + (cum(t)[..., 1] - cum(lo)[..., 1])

    def b(t):
        return slope_parts(t)[1]

    def da(t):
        return slope_parts(t)[0]

    def dc(t):
        g1, slope = slope_parts(t)
        return g1 * slope

    bound = error_bound(params, chat, "open")
    meta = {"gamma_c1": chat, "ac_bound": bound, "b_bound": eps,
            "x0": x0, "z0": z0}
    return LegendrianCurve(a, b, c, da, dc, params=params, kind="open",
                           meta=meta, domain=(lo, hi))


def approximate_closed(target: ParamCurve, eps: float, *, r: float | None = None,
                       n: int | None = None, grid_size: int = 400,
                       safety: float = DEFAULT_SAFETY, pad: float = 0.15,
                       order: int = 12, max_rounds: int = 12) -> LegendrianCurve:
    """Closed Legendrian curve C^0-close to a periodic target.

    The height component of the loop integral is corrected by a multiple of
    the profile f = gamma_1^2 / ||gamma_1^2||_L1 so the construction closes
    up; endpoint values and derivatives of (a, b, c) then agree to all
    orders.  The slope-play guarantee needs the amplitude large enough with
    n coupled as n ~ r^2, which is settled by an a-posteriori envelope
    measurement (doubling the amplitude until sup|b - y| <= eps).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not target.periodic:
        raise ValueError("closed approximation needs a periodic target")
    lo, hi = target.domain
    ends = np.array([lo, hi])
    pv = target(ends)
    dv = target.deriv(ends)
    scale = 1.0 + float(np.max(np.abs(pv))) + float(np.max(np.abs(dv)))
    if np.max(np.abs(pv[0] - pv[1])) > 1e-8 * scale or \
            np.max(np.abs(dv[0] - dv[1])) > 1e-8 * scale:
        raise ValueError("periodic target has mismatched endpoint jets")

    r_fixed = r is not None
    if r is None:
        r = choose_radius(target, eps / 2.0, grid_size=grid_size, safety=safety)

    last_envelope = math.inf
    for _ in range(max_rounds):
        fam = LoopFamily(target, float(r))
        chat = gamma_c1_estimate(fam)
        n_round = n if n is not None else choose_frequency(
            target, fam, eps, safety=safety, kind="closed", gamma_c1=chat)
        params = ApproxParams(eps=eps, r=float(r), n=int(n_round))
        curve, envelope = _build_closed(target, fam, params, chat, pad, order,
                                        grid_size)
        last_envelope = envelope
        if envelope <= eps * 0.999 or r_fixed or n is not None:
            return curve
        r = float(r) * 1.5
    raise ParameterSearchError(
        f"closed-curve amplitude search failed: sup|b - y| ~ {last_envelope:.3e} > eps={eps}")


def _build_closed(target, fam, params, chat, pad, order, grid_size):
    lo, hi = target.domain
    p0 = target(lo)
    x0, z0 = float(p0[0]), float(p0[2])
    r, n = params.r, params.n

    def raw_parts(u):
        u = np.asarray(u, dtype=float)
        dx, y, K = fam.coeffs(u)
        g1 = r * np.cos(n * u) + dx
        return g1, y, K

    def path(u):
        g1, y, K = raw_parts(u)
        return np.stack([g1, g1 * (y + K * g1), g1 * g1], axis=-1)

    edges = aligned_edges(lo, hi, n, pad=pad)
    cum = PanelCumulativeIntegral(path, edges, order)
    totals = cum.between(lo, hi)
    I2 = float(totals[1])
    g_l1 = float(totals[2])
    if g_l1 < 1e-8:
        raise ParameterSearchError("degenerate loop: ||gamma_1^2||_L1 ~ 0")
    corr = I2 / g_l1

    def slope_parts(t):
        g1, y, K = raw_parts(t)
        slope = y + (K - corr) * g1
        return g1, slope

    def a(t):
        return x0 + (cum(t)[..., 0] - cum(lo)[..., 0])

    def c(t):
        vals = cum(t) - cum(lo)
        return z0 + vals[..., 1] - corr * vals[..., 2]

    def b(t):
        return slope_parts(t)[1]

    def da(t):
        return slope_parts(t)[0]

    def dc(t):
        g1, slope = slope_parts(t)
        return g1 * slope

    # rigorous slope-error envelope: |b - y| <= (r + |x'|) |K - corr|
    tg = target.grid(max(grid_size, 1024))
    dx, y, K = fam.coeffs(tg)
    envelope = float(np.max((r + np.abs(dx)) * np.abs(K - corr)))

    # C^1 size of the height loop component alone, for the I2 bound
    sg = np.linspace(0.0, TAU, 257)
    g1g, g2g = fam.eval_grid(tg, sg)
    d1g, d2g = fam.ds_grid(tg, sg)
    h = 1e-3
    g2p = fam.eval_grid(tg + h, sg)[1]
    g2m = fam.eval_grid(tg - h, sg)[1]
    gamma2_c1 = float(np.max(np.abs(g2g)) + np.max(np.abs(d2g))
                      + np.max(np.abs((g2p - g2m) / (2 * h))))

    meta = {"gamma_c1": chat, "gamma2_c1": gamma2_c1, "I2": I2, "g_l1": g_l1,
            "ac_bound": error_bound(params, chat, "closed"),
            "I2_bound": FOUR_PI_SQ * gamma2_c1 / n,
            "b_envelope": envelope, "x0": x0, "z0": z0}
    curve = LegendrianCurve(a, b, c, da, dc, params=params, kind="closed",
                            meta=meta, domain=(lo, hi))
    return curve, envelope
