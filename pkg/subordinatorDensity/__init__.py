#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
subordinatorDensity - 从属子半群密度的数值计算

主要组件:
- models: Lévy 密度、尾积分、累积量函数与内置模型族
- numerics: 特殊函数、自适应积分、卷积幂网格
- methods: 复合泊松近似 (M1)、尾积分卷积 (M2)、倾斜围道 (M3)
- analysis: 时间级数、多方法对照、可积性诊断
- cli: 命令行前端
"""

__version__ = "0.1.0"

from .config.settings import ContourSpec, EpsilonScheme, QuadratureConfig, Settings, load_settings
from .errors import (
    CapabilityError,
    ConfigError,
    DomainError,
    NumericalError,
    SubordinatorDensityError,
)
from .models import SubordinatorModel, from_levy_density, make_gamma, make_ig, make_stable, parse_model_spec

__all__ = [
    "ContourSpec",
    "EpsilonScheme",
    "QuadratureConfig",
    "Settings",
    "load_settings",
    "CapabilityError",
    "ConfigError",
    "DomainError",
    "NumericalError",
    "SubordinatorDensityError",
    "SubordinatorModel",
    "from_levy_density",
    "make_gamma",
    "make_ig",
    "make_stable",
    "parse_model_spec",
]
