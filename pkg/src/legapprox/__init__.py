"""Legendrian approximation of curves in contact R^3 by convex integration."""

from .contact import ContactModel, ResidualReport, car_from_standard, legendrian_residual
from .convex_integration import (AmpleSet, ApproxParams, LegendrianCurve, LoopFamily,
                                 ParameterSearchError, ample_contains, approximate_closed,
                                 approximate_open, choose_frequency, choose_radius,
                                 error_bound, gamma_c1_estimate, loop_barycenter_check,
                                 loop_eval)
from .curves import (ParamCurve, SampledCurve, c0_norm, c1_norm, circle_target,
                     curve_from_components, helix_target, mollify, parking_target)
from .estimators import LegendrianApproximator, Mollifier
from .gluing import (ConeSet, Connector, GlueError, GlueProblem, affine_reparam,
                     barycenter_loop, choose_delta, connector_ramp, glue, radius_R,
                     w_factor)
from .oracles import (QuadratureError, QuadResult, c0_distance, endpoint_jet_match,
                      fd_derivative, membership_scan, quad_oracle)

__all__ = [
    "AmpleSet", "ApproxParams", "ConeSet", "Connector", "ContactModel",
    "GlueError", "GlueProblem", "LegendrianApproximator", "LegendrianCurve",
    "LoopFamily", "Mollifier", "ParamCurve", "ParameterSearchError",
    "QuadratureError", "QuadResult", "ResidualReport", "SampledCurve",
    "affine_reparam", "ample_contains", "approximate_closed", "approximate_open",
    "barycenter_loop", "c0_distance", "c0_norm", "c1_norm", "car_from_standard",
    "choose_delta", "choose_frequency", "choose_radius", "circle_target",
    "connector_ramp", "curve_from_components", "endpoint_jet_match", "error_bound",
    "fd_derivative", "gamma_c1_estimate", "glue", "helix_target",
    "legendrian_residual", "loop_barycenter_check", "loop_eval", "membership_scan",
    "mollify", "parking_target", "quad_oracle", "radius_R", "w_factor",
]

__version__ = "0.1.0"
