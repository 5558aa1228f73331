import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from legapprox import (ConeSet, GlueError, GlueProblem, ParamCurve, barycenter_loop,
                       choose_delta, connector_ramp, glue, quad_oracle, radius_R,
                       w_factor)
from legapprox.gluing import ramp_power_search
from conftest import random_glue_problem

TAU = 2.0 * math.pi


def _line_arc(domain=(-1.0, 1.0)):
    return ParamCurve(lambda t: np.stack([t, 0 * t, 0 * t], axis=-1),
                      lambda t: np.stack([np.ones_like(t), 0 * t, 0 * t], axis=-1),
                      domain=domain)


def sample_admissible_region(y0: float, eps: float, R: float,
                             total: int = 2000) -> np.ndarray:
    """Deterministic boundary-biased sampling of the admissible set cut to B_R.

    Includes the exact cone/circle corner points, so the sampled hull matches
    the true hull to round-off.
    """
    n_plus = math.hypot(1.0, y0 + eps)
    n_minus = math.hypot(1.0, y0 - eps)
    per = total // 5
    pts = []
    u = np.linspace(-R / n_plus, R / n_plus, per)
    pts.append(np.stack([u, (y0 + eps) * u], axis=-1))
    u = np.linspace(-R / n_minus, R / n_minus, per)
    pts.append(np.stack([u, (y0 - eps) * u], axis=-1))
    th = np.linspace(math.atan(y0 - eps), math.atan(y0 + eps), per)
    arc = R * np.stack([np.cos(th), np.sin(th)], axis=-1)
    pts.append(arc)
    pts.append(-arc)
    u = np.concatenate([np.linspace(-1, 1, per // 2), np.linspace(-1, 1, per - per // 2)])
    sgn = np.concatenate([np.ones(per // 2), -np.ones(per - per // 2)])
    pts.append(np.stack([u, y0 * u + sgn * eps * u * u], axis=-1))
    return np.concatenate(pts, axis=0)


def hull_contains_ball(points: np.ndarray, r: float, rel_tol: float = 1e-6) -> bool:
    hull = ConvexHull(points)
    dist = -hull.equations[:, 2]  # facet normals are unit vectors
    return bool(np.min(dist) >= r * (1.0 - rel_tol))


class TestRadiusFormula:
    def test_point_value(self):
        assert abs(radius_R(1.0, 0.0, 0.5) - math.sqrt(5.0)) <= 1e-12

    def test_linear_in_r(self):
        for y0 in (0.0, 0.7, -1.3):
            assert abs(radius_R(2.4, y0, 0.3) - 2.0 * radius_R(1.2, y0, 0.3)) <= 1e-12

    def test_validity_range(self):
        with pytest.raises(ValueError, match="r0"):
            radius_R(0.2, 0.0, 0.5)

    def test_w_factor(self):
        assert abs(w_factor(0.0, 0.5) - math.sqrt(1.25)) <= 1e-15

    @pytest.mark.parametrize("y0", [0.0, 1.0])
    def test_formula_radius_contains_ball(self, y0):
        eps, r = 0.3, 1.0
        R = radius_R(r, y0, eps)
        pts = sample_admissible_region(y0, eps, R)
        assert hull_contains_ball(pts, r)

    @pytest.mark.parametrize("y0", [0.0, 1.0])
    def test_below_true_minimum_fails(self, y0):
        # the true minimal factor is 1.0 at y0=0 and ~0.853 at y0=1, so 0.84 R
        # is below the containment threshold for both
        eps, r = 0.3, 1.0
        R = 0.84 * radius_R(r, y0, eps)
        pts = sample_admissible_region(y0, eps, R)
        assert not hull_contains_ball(pts, r)


class TestConeSet:
    def test_margins(self):
        cone = ConeSet(y0=0.5, eps=0.2)
        assert cone.margin(1.0, 0.5) == 0.2
        assert cone.margin(1.0, 0.8) < 0
        assert cone.margin(0.0, 0.0) == 0.0

    def test_eps_validated(self):
        with pytest.raises(ValueError):
            ConeSet(0.0, 0.0)


class TestGlueProblem:
    def test_eps_range_enforced(self):
        arc = _line_arc()
        with pytest.raises(ValueError, match="1/2"):
            GlueProblem(arc, arc, _line_arc(), eps=0.5)

    def test_closeness_enforced(self):
        ref = _line_arc()
        far = ParamCurve(lambda t: np.stack([t, 0 * t, 0 * t + 1.0], axis=-1),
                         lambda t: np.stack([np.ones_like(t), 0 * t, 0 * t], axis=-1),
                         domain=(-1, 1))
        with pytest.raises(ValueError, match="close"):
            GlueProblem(far, far, ref, eps=0.45)

    def test_domain_must_contain_zero(self):
        arc = _line_arc()
        bad = ParamCurve(arc.position, arc.velocity, domain=(0.5, 1.0))
        with pytest.raises(ValueError, match="contain 0"):
            GlueProblem(arc, arc, bad, eps=0.45)


class TestChooseDelta:
    def test_straight_reference(self):
        # C1 norm of (t,0,0) on [-1,1] is 2, so the binding cap is
        # eps^2 / 2 = 0.08 and delta lands in 0.9 * [0.9, 1] * 0.08
        arc = _line_arc()
        problem = GlueProblem(arc, arc, _line_arc(), eps=0.4)
        delta, rho = choose_delta(problem)
        assert 0.9 * 0.9 * 0.08 - 1e-12 <= delta <= 0.9 * 0.08 + 1e-12
        assert rho == delta / 4.0
        assert delta < 0.4 ** 2

    def test_degenerate_junctions_rejected(self):
        # constant arc: first derivative component vanishes identically
        const = ParamCurve(lambda t: np.zeros(np.shape(t) + (3,)),
                           lambda t: np.zeros(np.shape(t) + (3,)), domain=(-1, 1))
        ref = ParamCurve(lambda t: np.stack([0 * t, 0 * t, 0 * t], axis=-1),
                         lambda t: np.stack([0 * t, 0 * t, 0 * t], axis=-1),
                         domain=(-1, 1))
        problem = GlueProblem(const, const, ref, eps=0.45)
        with pytest.raises(GlueError, match="nondegenerate"):
            choose_delta(problem)


class TestConnectorRamp:
    def test_zero_deviation_stays_on_axis(self):
        # d3 = y0 d1 makes gamma_2 = y0 gamma_1 exactly along the ramp
        y0 = 0.7
        seg = connector_ramp((2.0, y0 * 2.0), y0, rho=0.1, k=4, side="left")
        th = np.linspace(0, 1, 200)
        vals = seg.eval_theta(th)
        np.testing.assert_allclose(vals[:, 1], y0 * vals[:, 0], atol=1e-15)

    def test_slope_endpoints(self):
        y0 = 0.3
        seg = connector_ramp((1.0, y0 + 0.1), y0, rho=0.1, k=2, side="left")
        assert abs(float(seg.slope_theta(1.0)) - (y0 + 0.1)) <= 1e-15
        assert abs(float(seg.slope_theta(0.0)) - y0) <= 1e-15

    def test_mass_closed_form_and_scaling(self):
        # with zero deviation the mass is rho |d1| sqrt(1+y0^2) / (k+1)
        y0, d1, rho = 0.4, 3.0, 0.05
        masses = {}
        for k in (4, 8, 16):
            seg = connector_ramp((d1, y0 * d1), y0, rho, k, "left")
            masses[k] = seg.mass()
            expected = rho * d1 * math.hypot(1.0, y0) / (k + 1)
            assert abs(masses[k] - expected) <= 1e-12
        assert abs(masses[8] / masses[4] - 5.0 / 9.0) <= 1e-9
        assert abs(masses[16] / masses[8] - 9.0 / 17.0) <= 1e-9

    def test_power_search_meets_bound(self):
        delta, eps = 0.05, 0.45
        seg = ramp_power_search((12.0, 0.1), 0.0, delta / 4.0, "left", delta, eps)
        assert seg.mass() < 0.5 * delta * eps

    def test_vanishing_junction_rejected(self):
        with pytest.raises(ValueError, match="vanishes"):
            connector_ramp((0.0, 1.0), 0.0, 0.1, 2, "left")

    def test_side_validated(self):
        with pytest.raises(ValueError, match="side"):
            connector_ramp((1.0, 0.0), 0.0, 0.1, 2, "middle")


class TestBarycenterLoop:
    def test_zero_target_is_constant_origin_loop(self):
        loop = barycenter_loop(np.zeros(2), y0=0.3, eps=0.3, R_cap=10.0)
        vals = loop.eval_v(np.linspace(0, 1, 50))
        np.testing.assert_allclose(vals, 0.0, atol=1e-15)

    def test_small_displacement(self):
        pbar = np.array([0.1, 0.0])
        loop = barycenter_loop(pbar, y0=0.0, eps=0.3, R_cap=30.0)
        mean = quad_oracle(lambda v: loop.eval_v(v), 0.0, 1.0, tol=1e-12).value
        np.testing.assert_allclose(mean, pbar, atol=1e-10)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_mean_membership_containment(self, seed):
        rng = np.random.default_rng(seed)
        y0 = float(rng.uniform(-0.8, 0.8))
        eps = 0.45
        pbar = rng.uniform(-2.5, 2.5, size=2)
        R_cap = radius_R(3.0 * 5.0, y0, eps)
        loop = barycenter_loop(pbar, y0, eps, R_cap)
        mean = quad_oracle(lambda v: loop.eval_v(v), 0.0, 1.0, tol=1e-12).value
        np.testing.assert_allclose(mean, pbar, atol=1e-10)
        vals = loop.eval_v(np.linspace(0, 1, 5001))
        u, w = vals[:, 0], vals[:, 1]
        margin = eps * np.minimum(np.abs(u), u * u) - np.abs(w - y0 * u)
        assert np.min(margin) >= -1e-12
        assert loop.sup_radius() <= R_cap

    def test_based_at_origin_and_flat(self):
        loop = barycenter_loop(np.array([0.5, 0.8]), 0.2, 0.45, 60.0)
        ends = loop.eval_v(np.array([0.0, 1.0]))
        np.testing.assert_allclose(ends, 0.0, atol=1e-13)
        # flat junctions: values stay at round-off level near the base point
        near = loop.eval_v(np.array([1e-4, 1.0 - 1e-4]))
        assert np.max(np.abs(near)) <= 1e-12

    def test_infeasible_cap_reported(self):
        with pytest.raises(GlueError, match="amplitude"):
            barycenter_loop(np.array([3.0, 50.0]), 0.0, 0.2, R_cap=4.0)


class TestGlue:
    def test_straight_overlap(self):
        # sigma = tau = reference: the connector must track it tightly
        arc = _line_arc()
        problem = GlueProblem(arc, arc, _line_arc(), eps=0.45)
        curve = glue(problem)
        meta = curve.meta
        d = meta["connector"].delta
        np.testing.assert_allclose(meta["p"], [1.0, 0.0], atol=1e-12)
        ends = curve.eval(np.array([-d, d]))
        np.testing.assert_allclose(ends[0], [-d, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(ends[1], [d, 0.0, 0.0], atol=1e-9)

    def test_randomized_problem_full_contract(self):
        problem = random_glue_problem(202)
        curve = glue(problem)
        meta = curve.meta
        d = meta["connector"].delta
        t = np.linspace(-d, d, 10_000)

        # junction values and first-order agreement
        np.testing.assert_allclose(curve.eval(np.array([-d]))[0][[0, 2]],
                                   meta["p1"], atol=1e-9)
        np.testing.assert_allclose(curve.eval(np.array([d]))[0][[0, 2]],
                                   meta["p2"], atol=1e-9)
        np.testing.assert_allclose(curve.deriv(np.array([-d]))[0][[0, 2]],
                                   meta["dp1"], atol=1e-9)
        np.testing.assert_allclose(curve.deriv(np.array([d]))[0][[0, 2]],
                                   meta["dp2"], atol=1e-9)
        assert abs(curve.b(np.array([-d]))[0] - problem.sigma(-d)[1]) <= 1e-9
        assert abs(curve.b(np.array([d]))[0] - problem.tau(d)[1]) <= 1e-9

        # slope and position bounds with the displayed constants
        ref = problem.reference
        assert np.max(np.abs(curve.b(t) - ref(t)[:, 1])) < meta["b_bound"]
        ac = np.max(np.linalg.norm(curve.eval(t)[:, [0, 2]] - ref(t)[:, [0, 2]], axis=1))
        assert ac <= meta["ac_bound"]
        assert max(meta["ramp_masses"]) < meta["ramp_mass_bound"]

        # Legendrian identity with analytic evaluators
        res = curve.dc(t) - curve.b(t) * curve.da(t)
        assert np.max(np.abs(res)) <= 1e-10

    def test_mean_identity_against_oracle(self):
        problem = random_glue_problem(203)
        curve = glue(problem)
        meta = curve.meta
        d, rho = meta["connector"].delta, meta["connector"].rho
        path = meta["connector"].path
        pieces = [(-d, -d + rho), (-d + rho, d - rho), (d - rho, d)]
        total = sum(quad_oracle(lambda u: path(np.atleast_1d(u))[0], a, b,
                                tol=1e-12).value
                    for a, b in pieces)
        np.testing.assert_allclose(total / (2 * d), meta["p"], atol=1e-10)

    def test_cone_membership_along_connector(self):
        problem = random_glue_problem(204)
        curve = glue(problem)
        meta = curve.meta
        d = meta["connector"].delta
        t = np.linspace(-d, d, 10_000)
        cone = ConeSet(y0=meta["y0"], eps=problem.eps)
        g1 = curve.da(t)
        g2 = curve.dc(t)
        assert np.min(cone.margin(g1, g2)) >= -1e-12

    def test_gianni_constant_value(self):
        # at y0 = 0 the uniform position bound constant is 17 eps
        eps = 0.45
        assert abs(eps * (14.0 + 12.0 * 0.25) - 17.0 * eps) <= 1e-15
