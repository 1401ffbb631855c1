#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
三种系数与密度算法：M1 复合泊松近似、M2 尾积分卷积、M3 倾斜围道
"""

from .contour import (
    ContinuedCumulant,
    DecayProfile,
    continuation_decay_profile,
    continue_cumulant,
    cumulant_on_contour,
    p_bromwich,
    p_bromwich_result,
    p_contour,
    p_contour_result,
    p_t_derivative_contour,
    p_t_derivative_contour_result,
    u_n_contour,
    u_n_contour_result,
)
from .cp_approx import (
    EpsilonApproximation,
    EpsilonCoefficient,
    ExtrapolationResult,
    LadderResult,
    LadderSample,
    c_epsilon,
    clear_cache,
    conv_power_from_coefficients,
    dominated_feasibility,
    extrapolate_to_zero,
    get_approximation,
    series_p_eps,
    u2_eps_stabilized,
    u2_stabilized,
    u_eps,
    u_eps_conv_power,
    u_n_eps,
    u_n_eps_detailed,
    u_n_eps_recurrence,
    u_n_eps_recursive,
    u_n_extrapolated,
)
from .tail_conv import (
    DampedInversionPlan,
    lambda_decay_slope,
    lambda_derivative,
    laplace_identity_residual,
    tail_conv_power,
    tail_powers,
    u_n_via_damped_inversion,
    u_n_via_damped_inversion_result,
    u_n_via_derivative,
    u_n_via_derivative_result,
)

__all__ = [
    "ContinuedCumulant",
    "DecayProfile",
    "continuation_decay_profile",
    "continue_cumulant",
    "cumulant_on_contour",
    "p_bromwich",
    "p_bromwich_result",
    "p_contour",
    "p_contour_result",
    "p_t_derivative_contour",
    "p_t_derivative_contour_result",
    "u_n_contour",
    "u_n_contour_result",
    "EpsilonApproximation",
    "EpsilonCoefficient",
    "ExtrapolationResult",
    "LadderResult",
    "LadderSample",
    "c_epsilon",
    "clear_cache",
    "conv_power_from_coefficients",
    "dominated_feasibility",
    "extrapolate_to_zero",
    "get_approximation",
    "series_p_eps",
    "u2_eps_stabilized",
    "u2_stabilized",
    "u_eps",
    "u_eps_conv_power",
    "u_n_eps",
    "u_n_eps_detailed",
    "u_n_eps_recurrence",
    "u_n_eps_recursive",
    "u_n_extrapolated",
    "DampedInversionPlan",
    "lambda_decay_slope",
    "lambda_derivative",
    "laplace_identity_residual",
    "tail_conv_power",
    "tail_powers",
    "u_n_via_damped_inversion",
    "u_n_via_damped_inversion_result",
    "u_n_via_derivative",
    "u_n_via_derivative_result",
]
