#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数值内核：特殊函数、积分与卷积网格
"""

from .grids import ConvolutionPowers, PanelInterpolant
from .quadrature import (
    IntegralResult,
    bromwich_integral,
    convolve_at,
    integrate_complex,
    integrate_finite,
    integrate_fourier,
    integrate_semi_infinite,
    integrate_to_infinity,
    ray_pair_integral,
    wynn_epsilon,
)
from .specfun import (
    EULER_GAMMA,
    PolySeq,
    bell_complete,
    bell_partial,
    bell_partial_table,
    erfc,
    exp_integral_e1,
    falling_factorial,
    gamma,
    hermite,
    hermite_poly,
    log_gamma,
    recip_gamma,
    recip_gamma_taylor_coeffs,
    zeta_int,
)

__all__ = [
    "ConvolutionPowers",
    "PanelInterpolant",
    "IntegralResult",
    "bromwich_integral",
    "convolve_at",
    "integrate_complex",
    "integrate_finite",
    "integrate_fourier",
    "integrate_semi_infinite",
    "integrate_to_infinity",
    "ray_pair_integral",
    "wynn_epsilon",
    "EULER_GAMMA",
    "PolySeq",
    "bell_complete",
    "bell_partial",
    "bell_partial_table",
    "erfc",
    "exp_integral_e1",
    "falling_factorial",
    "gamma",
    "hermite",
    "hermite_poly",
    "log_gamma",
    "recip_gamma",
    "recip_gamma_taylor_coeffs",
    "zeta_int",
]
