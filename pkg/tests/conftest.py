import math

import numpy as np
import pytest

from legapprox import GlueProblem, ParamCurve, affine_reparam, approximate_open

TAU = 2.0 * math.pi


def random_trig_target(seed: int, degree: int = 2, scale: float = 0.6,
                       periodic: bool = True) -> ParamCurve:
    """Random smooth target: each component a trig polynomial with decaying coefficients."""
    rng = np.random.default_rng(seed)
    ks = np.arange(1, degree + 1)
    cos_c = rng.uniform(-scale, scale, size=(3, degree)) / ks
    sin_c = rng.uniform(-scale, scale, size=(3, degree)) / ks
    offs = rng.uniform(-scale, scale, size=3)

    def position(t):
        t = np.asarray(t, dtype=float)
        kt = ks[None, :] * t[..., None]
        comps = [offs[i] + np.sum(cos_c[i] * np.cos(kt) + sin_c[i] * np.sin(kt), axis=-1)
                 for i in range(3)]
        return np.stack(comps, axis=-1)

    def velocity(t):
        t = np.asarray(t, dtype=float)
        kt = ks[None, :] * t[..., None]
        comps = [np.sum(ks * (-cos_c[i] * np.sin(kt) + sin_c[i] * np.cos(kt)), axis=-1)
                 for i in range(3)]
        return np.stack(comps, axis=-1)

    return ParamCurve(position, velocity, periodic=periodic)


def random_glue_problem(seed: int, eps: float = 0.45) -> GlueProblem:
    """Random reference around 0 with two independently constructed arcs."""
    rng = np.random.default_rng(seed)
    half = 0.55
    cx = rng.uniform(0.5, 1.0)
    ax, wx, px = rng.uniform(0.05, 0.25), int(rng.integers(1, 3)), rng.uniform(0, TAU)
    y00 = rng.uniform(-0.6, 0.6)
    ay, wy, py = rng.uniform(0.05, 0.25), int(rng.integers(1, 3)), rng.uniform(0, TAU)
    cz = rng.uniform(-0.8, 0.8)
    az, wz, pz = rng.uniform(0.05, 0.25), int(rng.integers(1, 3)), rng.uniform(0, TAU)

    def position(t):
        t = np.asarray(t, dtype=float)
        return np.stack([cx * t + ax * np.sin(wx * t + px),
                         y00 + ay * np.sin(wy * t + py),
                         cz * t + az * np.sin(wz * t + pz)], axis=-1)

    def velocity(t):
        t = np.asarray(t, dtype=float)
        return np.stack([cx + ax * wx * np.cos(wx * t + px),
                         ay * wy * np.cos(wy * t + py) + 0.0 * t,
                         cz + az * wz * np.cos(wz * t + pz)], axis=-1)

    ref = ParamCurve(position, velocity, domain=(-half, half))

    scale = 2.0 * half / TAU
    arc_target = ParamCurve(lambda u: position(-half + scale * u),
                            lambda u: scale * velocity(-half + scale * u))
    eps_arc = eps ** 2 / 4.0
    arcs = []
    for jitter in rng.uniform(0.8, 1.0, size=2):
        built = approximate_open(arc_target, eps_arc * jitter)
        arcs.append(affine_reparam(built, shift=TAU / 2.0, scale=1.0 / scale,
                                   new_domain=(-half, half)))
    return GlueProblem(sigma=arcs[0], tau=arcs[1], reference=ref, eps=eps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
