import math

import numpy as np
import pytest

from legapprox import (LoopFamily, ParamCurve, QuadratureError, approximate_open,
                       c0_distance, endpoint_jet_match, fd_derivative, helix_target,
                       membership_scan, quad_oracle)
from legapprox.oracles import endpoint_jet_defects

TAU = 2.0 * math.pi


class TestQuadOracle:
    def test_cos_full_period(self):
        res = quad_oracle(np.cos, 0.0, TAU, tol=1e-12)
        assert abs(float(res.value)) <= 1e-12
        assert res.est_error >= 0
        assert res.evaluations > 0

    def test_cos_squared(self):
        res = quad_oracle(lambda s: np.cos(s) ** 2, 0.0, TAU, tol=1e-12)
        assert abs(float(res.value) - math.pi) <= 1e-11

    def test_helix_loop_mass(self):
        # integrand (30 cos(200 u) + 1)^2 integrates to 902 pi over a period
        res = quad_oracle(lambda u: (30.0 * np.cos(200.0 * u) + 1.0) ** 2,
                          0.0, TAU, tol=1e-8)
        assert abs(float(res.value) - 902.0 * math.pi) <= 1e-7

    def test_vector_integrand(self):
        res = quad_oracle(lambda s: np.stack([np.cos(s) ** 2, np.sin(s) ** 2]),
                          0.0, TAU, tol=1e-12)
        np.testing.assert_allclose(res.value, [math.pi, math.pi], atol=1e-11)

    @pytest.mark.parametrize("seed", [3, 5, 11])
    def test_trig_polynomial_accuracy(self, seed):
        # high-degree trig polynomials integrate to their constant term
        rng = np.random.default_rng(seed)
        deg = int(rng.integers(200, 513))
        a0 = rng.normal()
        amps = rng.normal(size=4)
        freqs = rng.integers(1, deg + 1, size=4)

        def f(s):
            return a0 + sum(a * np.cos(k * s) for a, k in zip(amps, freqs))

        res = quad_oracle(f, 0.0, TAU, tol=1e-11)
        assert abs(float(res.value) - a0 * TAU) <= 1e-10

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            quad_oracle(np.cos, 1.0, 0.0)
        with pytest.raises(ValueError):
            quad_oracle(np.cos, 0.0, 1.0, tol=0.0)

    def test_nonconvergence_reported(self):
        with pytest.raises(QuadratureError):
            quad_oracle(lambda s: np.cos(2.0e5 * s) ** 2, 0.0, TAU, tol=1e-14)


class TestFdDerivative:
    def test_sin_at_zero(self):
        assert abs(float(fd_derivative(np.sin, 0.0, 1e-5)) - 1.0) <= 1e-9

    def test_square_at_one(self):
        assert abs(float(fd_derivative(lambda t: t * t, 1.0, 1e-5)) - 2.0) <= 1e-9

    def test_helix_position_component(self):
        # FD of the quadrature-based a matches the closed form of a'
        curve = approximate_open(helix_target(), 0.28, r=30.0, n=200)
        got = float(fd_derivative(curve.a, 0.3, 1e-6))
        expected = 30.0 * math.cos(60.0) + 1.0
        assert abs(got - expected) <= 1e-4

    def test_h_must_be_positive(self):
        with pytest.raises(ValueError):
            fd_derivative(np.sin, 0.0, 0.0)


class TestC0Distance:
    def test_identical(self):
        f = lambda t: np.stack([t, 0 * t, 0 * t], axis=-1)
        assert c0_distance(f, f, 101) == 0.0

    def test_constant_offset(self):
        f = lambda t: np.stack([t, 0 * t, 0 * t], axis=-1)
        g = lambda t: np.stack([t, 0 * t, 0 * t + 0.25], axis=-1)
        assert abs(c0_distance(f, g, 101) - 0.25) <= 1e-15

    def test_helix_approximation_under_bound(self):
        target = helix_target()
        curve = approximate_open(target, 0.28, r=30.0, n=200)
        dist = c0_distance(lambda t: curve.eval(t)[:, [0, 2]],
                           lambda t: target(t)[:, [0, 2]], 20_001)
        assert dist <= curve.meta["ac_bound"]

    def test_grid_size_validated(self):
        with pytest.raises(ValueError):
            c0_distance(np.sin, np.cos, 1)


class TestEndpointJets:
    def test_constant_curve_matches_any_order(self):
        f = lambda t: np.full(np.shape(t), 2.5)
        assert endpoint_jet_match(f, order=1)

    def test_open_helix_order_zero_fails(self):
        curve = approximate_open(helix_target(), 0.28, r=30.0, n=200)
        # a(0) = 0 while a(2 pi) = 2 pi
        assert not endpoint_jet_match(curve.a, order=0, tol=1e-9)
        d = endpoint_jet_defects(curve.a, order=0)
        assert abs(d[0] - TAU) <= 1e-9

    def test_periodic_formula_matches(self):
        assert endpoint_jet_match(np.sin, np.cos, order=1, tol=1e-12)


class TestMembershipScan:
    def test_flat_target_margin_zero_at_loop_zero(self):
        # z' = y x' means the loop sits on the admissible boundary exactly at
        # gamma_1 = 0 and strictly inside elsewhere; with x' = 0 the zero
        # lands on the s = pi/2 grid point
        flat = ParamCurve(lambda t: np.stack([0 * t, np.cos(t), 0 * t], axis=-1),
                          lambda t: np.stack([0 * t, -np.sin(t), 0 * t], axis=-1))
        fam = LoopFamily(flat, 2.0)
        grid = np.linspace(0.0, TAU, 401)
        worst = membership_scan(fam, 0.1, grid, grid)
        assert -1e-15 <= worst <= 1e-12
        assert membership_scan(fam, 0.1, grid, np.linspace(0.1, 1.0, 50)) > 0

    def test_helix_margins_at_the_true_threshold(self):
        # sup |b - y| for the r=30 helix loop is 124/451 ~ 0.2749, so the
        # membership scan passes at eps=0.28 and fails at eps=0.14
        fam = LoopFamily(helix_target(), 30.0)
        tg = np.linspace(0.0, TAU, 400)
        sg = np.linspace(0.0, TAU, 400)
        assert membership_scan(fam, 0.28, tg, sg) >= -1e-12
        assert membership_scan(fam, 0.14, tg, sg) < 0

    def test_small_amplitude_fails(self):
        fam = LoopFamily(helix_target(), 3.0)
        tg = np.linspace(0.0, TAU, 200)
        sg = np.linspace(0.0, TAU, 200)
        assert membership_scan(fam, 0.01, tg, sg) < 0
