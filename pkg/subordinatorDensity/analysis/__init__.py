#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
时间级数、多方法对照与可积性诊断
"""

from .diagnostics import IntegrabilityReport, check_integrability_hypothesis, integrability_summary
from .series import (
    COEFFICIENT_METHODS,
    DENSITY_METHODS,
    CoefficientRow,
    CoefficientSource,
    CoefficientTable,
    ComparisonReport,
    ComparisonRow,
    SeriesResult,
    build_coefficient_table,
    build_density_rows,
    coefficient_source,
    compare_methods,
    has_continuation,
    sum_series,
    unsupported_reason,
)

__all__ = [
    "IntegrabilityReport",
    "check_integrability_hypothesis",
    "integrability_summary",
    "COEFFICIENT_METHODS",
    "DENSITY_METHODS",
    "CoefficientRow",
    "CoefficientSource",
    "CoefficientTable",
    "ComparisonReport",
    "ComparisonRow",
    "SeriesResult",
    "build_coefficient_table",
    "build_density_rows",
    "coefficient_source",
    "compare_methods",
    "has_continuation",
    "sum_series",
    "unsupported_reason",
]
