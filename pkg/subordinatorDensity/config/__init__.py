#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
配置模块
"""

from .settings import (
    ContourSpec,
    EpsilonScheme,
    GridConfig,
    InversionDefaults,
    OutputConfig,
    QuadratureConfig,
    SeriesDefaults,
    Settings,
    default_ladder,
    load_settings,
)

__all__ = [
    "ContourSpec",
    "EpsilonScheme",
    "GridConfig",
    "InversionDefaults",
    "OutputConfig",
    "QuadratureConfig",
    "SeriesDefaults",
    "Settings",
    "default_ladder",
    "load_settings",
]
