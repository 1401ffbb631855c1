#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
从属子模型：抽象、内置族与模型描述解析
"""

from .base import (
    ConsistencyReport,
    SubordinatorModel,
    central_derivative,
    check_model_consistency,
    complex_power,
    cumulant_numeric,
    from_levy_density,
    kappa_derivative_numeric,
    tail_numeric,
)
from .families import (
    MODEL_REGISTRY,
    GammaParams,
    IGParams,
    StableParams,
    list_models,
    make_gamma,
    make_ig,
    make_stable,
    parse_model_spec,
    stable_series_density,
)

__all__ = [
    "ConsistencyReport",
    "SubordinatorModel",
    "central_derivative",
    "check_model_consistency",
    "complex_power",
    "cumulant_numeric",
    "from_levy_density",
    "kappa_derivative_numeric",
    "tail_numeric",
    "MODEL_REGISTRY",
    "GammaParams",
    "IGParams",
    "StableParams",
    "list_models",
    "make_gamma",
    "make_ig",
    "make_stable",
    "parse_model_spec",
    "stable_series_density",
]
