"""Gluing two local Legendrian approximations across a chart overlap.

Given two Legendrian arcs that both track a reference curve to within eps^2
on an overlap interval around 0, the connector is a Legendrian curve on
[-delta, delta] that matches the left arc at -delta and the right arc at
delta to first order.  Its derivative path runs: a polynomial ramp from the
left junction derivative down to 0, a closed barycenter loop based at 0
whose time average absorbs the junction displacement, and a ramp back up to
the right junction derivative.  The ramps stay in the cone
|v - y(0) u| <= eps |u|, the loop in the admissible region at t = 0, which
yields the quantitative slope and position bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .convex_integration import ApproxParams, LegendrianCurve
from .curves import ParamCurve, c1_norm
from .quadrature import PanelCumulativeIntegral

TAU = 2.0 * math.pi


class GlueError(RuntimeError):
    """The connector construction could not satisfy its quantitative bounds."""


@dataclass(frozen=True)
class ConeSet:
    """Cone |v - y0 u| <= eps |u| of derivative directions admissible near t=0."""

    y0: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def margin(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self.eps * np.abs(u) - np.abs(v - self.y0 * u)


def w_factor(y0: float, eps: float) -> float:
    """sqrt((1 + y0^2)(1 + (|y0| + eps)^2)), the geometry factor in R(r)."""
    return math.sqrt((1.0 + y0 * y0) * (1.0 + (abs(y0) + eps) ** 2))


def radius_R(r: float, y0: float, eps: float) -> float:
    """Radius R with closed ball B_r inside conv(admissible set cut to B_R).

    Valid for r above the pinch threshold r0 = eps / sqrt(1 + y0^2); exact
    for y0 = 0 and an upper bound otherwise.
    """
    r0 = eps / math.sqrt(1.0 + y0 * y0)
    if not r > r0:
        raise ValueError(f"formula needs r > r0 = {r0:.6g}, got r = {r:.6g}")
    return r / eps * w_factor(y0, eps)


# shared composite Gauss-Legendre grid on [0, 1] for ramp masses and loop moments
_UNIT_NODES, _UNIT_WEIGHTS = leggauss(16)
_UNIT_EDGES = np.linspace(0.0, 1.0, 257)
_UM = 0.5 * (_UNIT_EDGES[:-1] + _UNIT_EDGES[1:])
_UH = 0.5 * np.diff(_UNIT_EDGES)
UNIT_GRID_POINTS = (_UM[:, None] + _UH[:, None] * _UNIT_NODES[None, :]).ravel()
UNIT_GRID_WEIGHTS = (_UH[:, None] * _UNIT_WEIGHTS[None, :]).ravel()


def _unit_integral(values: np.ndarray) -> float | np.ndarray:
    """Integral over [0,1] of samples taken at UNIT_GRID_POINTS."""
    return np.tensordot(UNIT_GRID_WEIGHTS, values, axes=(0, 0))


def affine_reparam(curve, shift: float, scale: float,
                   new_domain: tuple[float, float]) -> ParamCurve:
    """View a curve through the substitution t -> shift + scale * t.

    Reparametrization preserves the Legendrian property; velocities pick up
    the factor scale.
    """
    evalf = curve.eval if hasattr(curve, "eval") else curve
    derivf = curve.deriv

    def position(t):
        return np.asarray(evalf(shift + scale * np.asarray(t, dtype=float)), dtype=float)

    def velocity(t):
        return scale * np.asarray(derivf(shift + scale * np.asarray(t, dtype=float)), dtype=float)

    return ParamCurve(position, velocity, periodic=False, domain=new_domain)


@dataclass(frozen=True)
class GlueProblem:
    """Two Legendrian arcs, a reference curve on the overlap, and the slope play.

    Arcs and reference are 3-component curves over an interval containing 0;
    both arcs must track the reference to within eps^2 in sup norm on the
    reference's domain (checked on a grid at construction).
    """

    sigma: ParamCurve
    tau: ParamCurve
    reference: ParamCurve
    eps: float

    def __post_init__(self):
        if not (0.0 < self.eps < 0.5):
            raise ValueError("eps must lie in (0, 1/2)")
        lo, hi = self.reference.domain
        if not (lo < 0.0 < hi):
            raise ValueError("reference domain must contain 0 in its interior")
        t = np.linspace(lo, hi, 512)
        ref = self.reference(t)
        for name, arc in (("sigma", self.sigma), ("tau", self.tau)):
            dist = float(np.max(np.linalg.norm(arc(t) - ref, axis=-1)))
            if dist >= self.eps ** 2:
                raise ValueError(
                    f"{name} is not eps^2-close to the reference on the overlap: "
                    f"{dist:.4g} >= {self.eps ** 2:.4g}")

    @property
    def y0(self) -> float:
        return float(self.reference(0.0)[1])


def choose_delta(problem: GlueProblem, candidates: int = 65) -> tuple[float, float]:
    """Half-width of the splice window and the ramp length rho = delta / 4.

    delta is 0.9 * min(eps^2, interval margin, eps^2 / C1-norm of the
    reference), then perturbed within 10% to keep both junction first
    components away from zero (the ramp formulas divide by them).
    """
    eps = problem.eps
    lo, hi = problem.reference.domain
    c1 = c1_norm(problem.reference, 512)
    delta0 = 0.9 * min(eps ** 2, 0.9 * min(-lo, hi), eps ** 2 / max(c1, 1e-300))

    speeds = np.abs(problem.sigma.deriv(np.linspace(lo, hi, 256))[:, 0])
    scale = float(np.max(speeds)) + 1e-30
    best_delta, best_score = None, -1.0
    for mult in np.linspace(1.0, 0.9, candidates):
        d = mult * delta0
        score = min(abs(float(problem.sigma.deriv(-d)[0])),
                    abs(float(problem.tau.deriv(d)[0])))
        if score > best_score:
            best_delta, best_score = d, score
    if best_score < 1e-9 * scale:
        raise GlueError("could not find nondegenerate junctions within the "
                        "10% perturbation budget")
    assert best_delta < eps ** 2 and lo < -best_delta and best_delta < hi
    assert best_delta * c1 <= eps ** 2
    return float(best_delta), float(best_delta) / 4.0


@dataclass(frozen=True)
class RampSegment:
    """Polynomial ramp between a junction derivative and 0, inside the cone.

    In the ramp variable theta (1 at the junction, 0 at the loop end):
        gamma_1 = theta^k * d1
        gamma_2 = gamma_1 * (y0 + (d3/d1 - y0) theta^k)
    so the slope runs from the arc's slope at theta=1 to y0 at theta=0.
    """

    d1: float
    d3: float
    y0: float
    rho: float
    k: int

    def __post_init__(self):
        if self.d1 == 0.0:
            raise ValueError("junction first component vanishes; perturb delta")
        if self.k < 1:
            raise ValueError("ramp exponent must be >= 1")

    def parts_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        tk = theta ** self.k
        g1 = tk * self.d1
        slope = self.y0 + ((self.d3 - self.y0 * self.d1) / self.d1) * tk
        return g1, slope

    def slope_theta(self, theta):
        return self.parts_theta(theta)[1]

    def eval_theta(self, theta):
        g1, slope = self.parts_theta(theta)
        return np.stack([g1, g1 * slope], axis=-1)

    def mass(self) -> float:
        """Time integral of |gamma| over the ramp (length rho)."""
        vals = self.eval_theta(UNIT_GRID_POINTS)
        return self.rho * float(_unit_integral(np.linalg.norm(vals, axis=-1)))

    def vector_integral(self) -> np.ndarray:
        """Time integral of gamma over the ramp."""
        return self.rho * np.asarray(_unit_integral(self.eval_theta(UNIT_GRID_POINTS)))


def connector_ramp(endpoint_deriv: tuple[float, float], y0: float, rho: float,
                   k: int, side: str) -> RampSegment:
    """Ramp segment for one side of the connector.

    ``side`` is 'left' (junction at -delta, theta falls 1 -> 0 in time) or
    'right' (junction at +delta, theta rises 0 -> 1); the segment itself is
    parametrized by theta, the caller maps time accordingly.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    d1, d3 = float(endpoint_deriv[0]), float(endpoint_deriv[1])
    return RampSegment(d1=d1, d3=d3, y0=float(y0), rho=float(rho), k=int(k))


def ramp_power_search(endpoint_deriv, y0, rho, side, delta, eps,
                      k0: int = 2, k_cap: int = 1 << 16) -> RampSegment:
    """Smallest power-of-two exponent whose ramp mass is below delta*eps/2."""
    k = k0
    while k <= k_cap:
        seg = connector_ramp(endpoint_deriv, y0, rho, k, side)
        if seg.mass() < 0.5 * delta * eps:
            return seg
        k *= 2
    raise GlueError("ramp mass bound unattainable within exponent cap")


def _flat_step(v: np.ndarray, xi: float) -> np.ndarray:
    """Smooth 0 -> 1 step on [0,1], flat to all orders at both ends."""
    v = np.asarray(v, dtype=float)
    a = np.zeros_like(v)
    b = np.zeros_like(v)
    m = v > 0
    a[m] = np.exp(-xi / v[m])
    m = v < 1
    b[m] = np.exp(-xi / (1.0 - v[m]))
    return a / (a + b)


@dataclass(frozen=True)
class LoopSegment:
    """Closed loop based at the origin with prescribed time average.

    The loop is the quadratic family u -> (u, u(y0 + kappa u)) traversed
    through the phase s0 + 2 pi W * flat_step(v); the offset q1 and the
    curvature kappa are solved so the time average over v in [0,1] equals
    pbar exactly, the base phase s0 puts the endpoints at the origin, and
    the flat step makes every derivative vanish there.
    """

    pbar: np.ndarray
    y0: float
    r: float
    q1: float
    kappa: float
    s0: float
    windings: int
    xi: float

    def phase(self, v):
        return self.s0 + TAU * self.windings * _flat_step(v, self.xi)

    def parts_v(self, v):
        g1 = self.r * np.cos(self.phase(v)) + self.q1
        slope = self.y0 + self.kappa * g1
        return g1, slope

    def slope_v(self, v):
        return self.parts_v(v)[1]

    def eval_v(self, v):
        g1, slope = self.parts_v(v)
        return np.stack([g1, g1 * slope], axis=-1)

    def sup_radius(self, samples: int = 4001) -> float:
        vals = self.eval_v(np.linspace(0.0, 1.0, samples))
        return float(np.max(np.linalg.norm(vals, axis=-1)))


def _zero_loop(y0: float) -> LoopSegment:
    return LoopSegment(pbar=np.zeros(2), y0=y0, r=0.0, q1=0.0, kappa=0.0,
                       s0=0.5 * math.pi, windings=0, xi=0.08)


def barycenter_loop(pbar, y0: float, eps: float, R_cap: float, *,
                    windings: int = 3, xi: float = 0.08) -> LoopSegment:
    """Origin-based admissible loop with exact time average pbar.

    Searches the smallest amplitude whose loop stays inside the admissible
    region (margin >= 0 on a dense scan) and inside the radius cap; raises
    GlueError with the failing margins when no amplitude fits.
    """
    pbar = np.asarray(pbar, dtype=float)
    if np.linalg.norm(pbar) < 1e-13:
        return _zero_loop(y0)

    base_phase = TAU * windings * _flat_step(UNIT_GRID_POINTS, xi)
    cos_b, sin_b = np.cos(base_phase), np.sin(base_phase)

    def solve(r: float) -> LoopSegment | None:
        s0 = math.acos(max(-1.0, min(1.0, -pbar[0] / r)))
        q1 = pbar[0]
        for _ in range(400):
            cosS = math.cos(s0) * cos_b - math.sin(s0) * sin_b
            alpha = float(_unit_integral(cosS))
            q1 = pbar[0] - r * alpha
            if abs(q1) > 0.985 * r:
                return None
            s0_new = math.acos(max(-1.0, min(1.0, -q1 / r)))
            if abs(s0_new - s0) < 1e-15:
                s0 = s0_new
                break
            s0 = s0_new
        cosS = math.cos(s0) * cos_b - math.sin(s0) * sin_b
        lam1 = r * cosS + q1
        lam1_sq = float(_unit_integral(lam1 * lam1))
        if lam1_sq <= 1e-12:
            return None
        kappa = (pbar[1] - y0 * pbar[0]) / lam1_sq
        # exact membership: |v - y0 u| = |kappa| u^2 over u in [q1-r, q1+r],
        # admissible iff |kappa| max(1, sup|u|) <= eps (no grid needed)
        u_sup = r + abs(q1)
        if abs(kappa) * max(1.0, u_sup) > eps * (1.0 - 1e-9):
            return None
        uu = np.linspace(q1 - r, q1 + r, 8001)
        if float(np.max(np.hypot(uu, uu * (y0 + kappa * uu)))) > R_cap * (1.0 - 1e-9):
            return None
        return LoopSegment(pbar=pbar, y0=y0, r=r, q1=q1, kappa=kappa, s0=s0,
                           windings=windings, xi=xi)

    r = max(0.5, 1.25 * abs(float(pbar[0])))
    found, r_found = None, None
    tried = []
    while r <= 8.0 * R_cap:
        seg = solve(r)
        tried.append(r)
        if seg is not None:
            found, r_found = seg, r
            break
        r *= 1.3
    if found is None:
        raise GlueError(
            f"no admissible loop amplitude for pbar={pbar}, eps={eps}, "
            f"R_cap={R_cap:.4g} (tried r up to {tried[-1]:.4g})")

    # shrink toward the smallest feasible amplitude: smaller loops leave more
    # containment slack under the radius cap
    lo = r_found / 1.3
    hi = r_found
    for _ in range(25):
        mid = 0.5 * (lo + hi)
        seg = solve(mid)
        if seg is not None:
            found, hi = seg, mid
        else:
            lo = mid
    return found


@dataclass(frozen=True)
class Connector:
    """Assembled derivative path data of a glued curve."""

    delta: float
    rho: float
    k: tuple[int, int]
    path: Callable
    loop_r: float


def glue(problem: GlueProblem, *, windings: int = 3, xi: float = 0.08,
         order: int = 16) -> LegendrianCurve:
    """Legendrian connector on [-delta, delta] splicing the two arcs.

    Matches sigma at -delta and tau at delta (values and first derivatives),
    keeps |b - y| < 2 eps, and keeps |(a,c) - (x,z)| within the uniform
    eps (14 + 12 (|y0| + 1/2)^2) bound.
    """
    eps = problem.eps
    y0 = problem.y0
    delta, rho = choose_delta(problem)

    ps, ds = problem.sigma(-delta), problem.sigma.deriv(-delta)
    pt, dt_ = problem.tau(delta), problem.tau.deriv(delta)
    p1 = np.array([ps[0], ps[2]])
    dp1 = np.array([ds[0], ds[2]])
    p2 = np.array([pt[0], pt[2]])
    dp2 = np.array([dt_[0], dt_[2]])

    cone = ConeSet(y0=y0, eps=eps)
    for name, dp in (("sigma", dp1), ("tau", dp2)):
        if cone.margin(dp[0], dp[1]) < -1e-12 * (1.0 + abs(dp[0])):
            raise GlueError(f"junction derivative of {name} leaves the cone")

    p = (p2 - p1) / (2.0 * delta)
    rbar = 2.0 * eps ** 2 / delta
    if np.linalg.norm(p) > rbar * (1.0 + 1e-9):
        raise GlueError("junction displacement exceeds the 2 eps^2/delta ball")

    ramp_l = ramp_power_search(dp1, y0, rho, "left", delta, eps)
    ramp_r = ramp_power_search(dp2, y0, rho, "right", delta, eps)

    t1, t2 = -delta + rho, delta - rho
    span_mid = t2 - t1
    pbar = (2.0 * delta * p - ramp_l.vector_integral()
            - ramp_r.vector_integral()) / (2.0 * (delta - rho))
    if np.linalg.norm(pbar) > 3.0 * rbar * (1.0 + 1e-9):
        raise GlueError("ramp-corrected displacement exceeds the 3 rbar ball")
    R_cap = radius_R(3.0 * rbar, y0, eps)

    loop = barycenter_loop(pbar, y0, eps, R_cap, windings=windings, xi=xi)

    def parts(t):
        t = np.asarray(t, dtype=float)
        g1 = np.empty_like(t)
        slope = np.empty_like(t)
        left = t < t1
        right = t > t2
        mid = ~(left | right)
        if np.any(left):
            theta = 1.0 - (delta + t[left]) / rho
            g1[left], slope[left] = ramp_l.parts_theta(theta)
        if np.any(mid):
            v = (t[mid] - t1) / span_mid
            g1[mid], slope[mid] = loop.parts_v(v)
        if np.any(right):
            theta = 1.0 - (delta - t[right]) / rho
            g1[right], slope[right] = ramp_r.parts_theta(theta)
        return g1, slope

    def path(t):
        g1, slope = parts(t)
        return np.stack([g1, g1 * slope], axis=-1)

    n_ramp = max(16, max(ramp_l.k, ramp_r.k) // 4)
    n_mid = max(64, 32 * max(windings, 1))
    edges = np.concatenate([
        np.linspace(-delta, t1, n_ramp + 1),
        np.linspace(t1, t2, n_mid + 1)[1:],
        np.linspace(t2, delta, n_ramp + 1)[1:],
    ])
    cum = PanelCumulativeIntegral(path, edges, order=order)

    def a(t):
        return p1[0] + cum(t)[..., 0]

    def c(t):
        return p1[1] + cum(t)[..., 1]

    def b(t):
        return parts(t)[1]

    def da(t):
        return parts(t)[0]

    def dc(t):
        g1, slope = parts(t)
        return g1 * slope

    end = cum.between(-delta, delta)
    end_defect = float(np.max(np.abs(p1 + end - p2)))
    if end_defect > 1e-9:
        raise GlueError(f"connector endpoint defect {end_defect:.3e} exceeds 1e-9")

    gianni_bound = eps * (14.0 + 12.0 * (abs(y0) + 0.5) ** 2)
    params = ApproxParams(eps=eps, r=max(loop.r, 1e-9), n=max(windings, 1))
    meta = {
        "connector": Connector(delta=delta, rho=rho, k=(ramp_l.k, ramp_r.k),
                               path=path, loop_r=loop.r),
        "y0": y0, "p1": p1, "p2": p2, "dp1": dp1, "dp2": dp2, "p": p,
        "pbar": pbar, "rbar": rbar, "R_cap": R_cap,
        "ramp_masses": (ramp_l.mass(), ramp_r.mass()),
        "ramp_mass_bound": 0.5 * delta * eps,
        "b_bound": 2.0 * eps, "ac_bound": gianni_bound,
    }
    return LegendrianCurve(a, b, c, da, dc, params=params, kind="glued",
                           meta=meta, domain=(-delta, delta))
