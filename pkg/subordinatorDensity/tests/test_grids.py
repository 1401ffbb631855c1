#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
卷积幂网格测试，核取 Gamma(1/2, 1) 密度，其 k 重卷积为 Gamma(k/2, 1) 密度
"""

import logging
import math

import numpy as np
import pytest
import scipy.special as sc

from subordinatorDensity.config.settings import GridConfig, QuadratureConfig
from subordinatorDensity.errors import DomainError
from subordinatorDensity.numerics.grids import ConvolutionPowers, PanelInterpolant

logger = logging.getLogger("test_grids")


def half_gamma(y: float) -> float:
    return y ** -0.5 * math.exp(-y) / math.sqrt(math.pi) if y > 0 else 0.0


def gamma_density(shape: float, x: float) -> float:
    return x ** (shape - 1.0) * math.exp(-x) / math.gamma(shape)


@pytest.fixture(scope="module")
def powers():
    return ConvolutionPowers(half_gamma, QuadratureConfig(), GridConfig(), x_max=4.0, kernel_exponent=-0.5,
                             name="gamma(1/2)")


def test_panel_interpolant_accuracy():
    logger.info("=== 测试对数面板插值 ===")
    f = lambda z: z ** -0.5 * math.exp(-z)  # noqa: E731
    interp = PanelInterpolant.from_function(f, 0.0, 5.0, GridConfig())
    for z in np.geomspace(1e-6, 4.9, 23):
        assert interp(float(z)) == pytest.approx(f(z), rel=1e-9)
    tiny = 5.0 * 1e-10
    assert interp(tiny) == pytest.approx(f(tiny), rel=1e-6)
    assert interp(0.0) == 0.0
    assert interp(-1.0) == 0.0
    assert interp.upper == pytest.approx(5.0)
    with pytest.raises(DomainError):
        interp(6.0)
    with pytest.raises(DomainError):
        PanelInterpolant.from_function(f, 0.0, 0.0, GridConfig())


def test_shifted_interpolant():
    interp = PanelInterpolant.from_function(lambda z: math.exp(-z), 1.0, 2.0, GridConfig())
    assert interp(1.0) == 0.0
    assert interp(2.0) == pytest.approx(math.exp(-2.0), rel=1e-10)


@pytest.mark.parametrize("start,span", [(0.0, 18.680689755106524), (0.0, 5.0), (1.5, 7.3), (0.0, 0.37), (2.0, 123.456)])
def test_interpolant_samples_stay_inside_span(start, span):
    seen = []

    def f(z: float) -> float:
        seen.append(z)
        return math.exp(-(z - start))

    interp = PanelInterpolant.from_function(f, start, span, GridConfig())
    assert max(seen) <= start + span
    assert min(seen) > start
    assert interp.upper == pytest.approx(start + span, rel=1e-12)


def test_convolution_powers_direct_and_gridded(powers):
    logger.info("=== 测试卷积幂 ===")
    assert powers.power(1, 0.7) == pytest.approx(half_gamma(0.7))
    assert powers.power_exponent(1) == -0.5
    assert powers.power_exponent(2) is None
    for x in (0.2, 1.0, 3.0):
        assert powers.power(2, x) == pytest.approx(math.exp(-x), rel=1e-9)
        assert powers.power(3, x) == pytest.approx(gamma_density(1.5, x), rel=1e-7)
    assert powers.power(2, 0.0) == 0.0
    with pytest.raises(DomainError):
        powers.power(0, 1.0)


def test_cumulative_powers(powers):
    for x in (0.5, 2.0):
        assert powers.cumulative(1, x) == pytest.approx(sc.gammainc(0.5, x), rel=1e-9)
        assert powers.cumulative(2, x) == pytest.approx(-math.expm1(-x), rel=1e-7)


def test_grid_validation_against_direct(powers):
    assert powers.validate_against_direct(2, samples=5) < 1e-7
    with pytest.raises(DomainError):
        powers.validate_against_direct(1)


def test_range_extension():
    cp = ConvolutionPowers(half_gamma, QuadratureConfig(), GridConfig(), x_max=2.0, kernel_exponent=-0.5)
    assert cp.power(2, 5.0) == pytest.approx(math.exp(-5.0), rel=1e-8)
    assert cp.x_max >= 5.0
    with pytest.raises(DomainError):
        ConvolutionPowers(half_gamma, QuadratureConfig(), GridConfig(), x_max=0.0)


def test_stale_grid_is_rebuilt_after_extension():
    logger.info("=== 测试网格扩展后的重建 ===")
    cp = ConvolutionPowers(half_gamma, QuadratureConfig(), GridConfig(), x_max=2.0, kernel_exponent=-0.5)
    short = cp.interpolant(2)
    assert cp.power(3, 5.0) == pytest.approx(gamma_density(1.5, 5.0), rel=1e-7)
    assert cp.x_max >= 5.0
    cp._powers[2] = short
    rebuilt = cp.interpolant(2)
    assert rebuilt is not short
    assert rebuilt.upper >= cp.x_max * (1.0 - 1e-12)
    assert cp.power(3, 4.5) == pytest.approx(gamma_density(1.5, 4.5), rel=1e-7)


def test_truncated_kernel_support():
    eps = 0.5
    kernel = lambda y: 1.0 / y if y > eps else 0.0  # noqa: E731
    cp = ConvolutionPowers(kernel, QuadratureConfig(), GridConfig(), x_max=3.0, support_start=eps,
                           kernel_breaks=(eps,))
    assert cp.power(2, 0.9) == 0.0
    # ∫_{ε}^{x−ε} dy / (y(x−y)) = (2/x)·ln((x−ε)/ε)
    x = 2.0
    assert cp.power(2, x) == pytest.approx(2.0 / x * math.log((x - eps) / eps), rel=1e-9)
    assert cp.cumulative(1, x) == pytest.approx(math.log(x / eps), rel=1e-10)


if __name__ == "__main__":
    pytest.main([__file__])
