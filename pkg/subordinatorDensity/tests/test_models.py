#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
模型层测试：内置族的自洽性、闭式参照解、用户模型的数值补全与模型描述解析
"""

import logging
import math

import numpy as np
import pytest
from scipy import integrate

from subordinatorDensity.errors import ConfigError, DomainError
from subordinatorDensity.models import (
    central_derivative,
    check_model_consistency,
    complex_power,
    cumulant_numeric,
    from_levy_density,
    kappa_derivative_numeric,
    list_models,
    make_gamma,
    make_ig,
    make_stable,
    parse_model_spec,
    stable_series_density,
    StableParams,
    tail_numeric,
)
from subordinatorDensity.models.families import ig_tail_conv_cube, ig_unit_tail, stable_tail_conv_power

logger = logging.getLogger("test_models")

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def ig_levy(x):
    return np.power(x, -1.5) * np.exp(-0.5 * x) / _SQRT_2PI


@pytest.mark.parametrize("spec", ["stable:alpha=0.5", "stable:alpha=0.7", "gamma", "gamma:shape=2,rate=0.5",
                                  "ig", "ig:delta=2,gamma=0.5"])
def test_builtin_models_are_consistent(spec):
    logger.info(f"=== 测试模型自洽性: {spec} ===")
    report = check_model_consistency(parse_model_spec(spec))
    assert report.ok, report.messages
    assert report.cumulant_at_zero == 0.0


def test_parse_model_spec():
    model = parse_model_spec(" Stable:alpha=0.25 ")
    assert model.name == "stable"
    assert model.label == "stable:alpha=0.25"
    assert parse_model_spec("gamma").label == "gamma:shape=1,rate=1"
    assert parse_model_spec("ig:delta=2").params == {"delta": 2.0, "gamma": 1.0}
    for bad in ("foo", "stable", "stable:alpha=1.5", "gamma:shape", "gamma:size=1", "gamma:shape=x", "ig:delta=-1"):
        with pytest.raises(ConfigError):
            parse_model_spec(bad)


def test_list_models():
    models = {m["name"]: m for m in list_models()}
    assert set(models) == {"stable", "gamma", "ig"}
    assert models["stable"]["params"]["alpha"]["default"] is None
    assert models["gamma"]["params"]["shape"]["default"] == 1.0


def test_builtin_capabilities():
    stable, gamma, ig = make_stable(StableParams(alpha=0.5)), make_gamma(), make_ig()
    assert stable.stable_part[1] == 0.5 and stable.remainder_exponent == math.inf
    assert gamma.stable_part is None and gamma.oracle_max_order == 21
    assert ig.stable_part == pytest.approx((1.0 / _SQRT_2PI, 0.5))
    assert ig.remainder_exponent == -0.5
    for model in (stable, gamma, ig):
        assert model.growth_rate == 0.0
        assert model.levy_density_analytic
        assert model.continuation is not None


def test_cumulant_closed_forms():
    logger.info("=== 测试累积量闭式 ===")
    assert make_ig().cumulant(1.0) == pytest.approx(1.0 - math.sqrt(3.0))
    assert make_gamma().cumulant(1.0) == pytest.approx(-math.log(2.0))
    assert make_stable(StableParams(alpha=0.5)).cumulant(4.0) == pytest.approx(-2.0)
    thetas = np.array([0.5, 1.0 + 2.0j, 3.0 - 1.0j])
    assert make_gamma().cumulant(thetas).shape == (3,)


@pytest.mark.parametrize("model", [make_gamma(), make_ig(), make_stable(StableParams(alpha=0.5))],
                         ids=["gamma", "ig", "stable"])
def test_cumulant_derivatives_match_integrals(model):
    for k in (1, 2, 3):
        for theta in (1.0, 2.0 + 1.0j):
            closed = complex(model.kappa_derivative(k, theta))
            numeric = kappa_derivative_numeric(model, k, theta)
            assert abs(closed - numeric) <= 1e-8 * abs(closed)


def test_levy_derivative_closed_vs_numeric():
    for model in (make_gamma(), make_ig()):
        for k in (1, 2):
            x = 1.3
            closed = model.levy_derivative(k, x)
            numeric, err = central_derivative(lambda y: float(model.levy_density(y)), k, x)
            assert numeric == pytest.approx(closed, rel=1e-5)
            assert err < 1e-2 * abs(closed)
    assert make_gamma().levy_derivative(0, 2.0) == pytest.approx(math.exp(-2.0) / 2.0)


def test_central_derivative():
    value, err = central_derivative(math.exp, 2, 1.0)
    assert value == pytest.approx(math.e, rel=1e-8)
    assert err >= 0
    with pytest.raises(DomainError):
        central_derivative(math.exp, 2, 0.01, step=0.1)


def test_complex_power_branch():
    assert complex_power(-1.0, 0.5) == pytest.approx(1j)
    assert complex_power(0.0, 0.5) == 0
    assert complex_power(4.0, -0.5) == pytest.approx(0.5)
    arr = complex_power(np.array([1.0, 1j]), 2.0)
    assert np.allclose(arr, [1.0, -1.0])


@pytest.mark.parametrize("spec,x,t", [("ig", 2.0, 0.1), ("gamma", 1.0, 0.2), ("stable:alpha=0.5", 1.0, 0.3),
                                      ("ig:delta=2,gamma=0.5", 1.5, 0.2)])
def test_oracle_coefficients_are_time_derivatives(spec, x, t):
    logger.info(f"=== 测试参照系数与密度的 Taylor 关系: {spec} ===")
    model = parse_model_spec(spec)
    total = math.fsum(model.oracle_u_n(n, x) * t ** n / math.factorial(n) for n in range(1, 19))
    assert total == pytest.approx(model.oracle_p(x, t), rel=1e-9)


def test_oracle_values():
    gamma = make_gamma()
    assert gamma.oracle_u_n(1, 1.0) == pytest.approx(math.exp(-1.0))
    assert gamma.oracle_u_n(2, 1.0) == pytest.approx(2.0 * 0.5772156649015329 * math.exp(-1.0), rel=1e-12)
    assert gamma.oracle_p(1.0, 2.0) == pytest.approx(math.exp(-1.0))
    ig = make_ig()
    assert ig.oracle_p(1.0, 1.0) == pytest.approx(1.0 / _SQRT_2PI)
    assert ig.oracle_u_n(1, 0.7) == pytest.approx(ig_levy(0.7))
    stable = make_stable(StableParams(alpha=0.5))
    x, t = 1.0, 1.0
    assert stable.oracle_p(x, t) == pytest.approx(t / (2 * math.sqrt(math.pi)) * x ** -1.5 * math.exp(-t * t / (4 * x)),
                                                  rel=1e-9)
    with pytest.raises(DomainError):
        gamma.oracle_u_n(22, 1.0)


@pytest.mark.parametrize("spec", ["ig", "gamma:shape=1.5,rate=2"])
def test_oracle_density_integrates_to_one(spec):
    model = parse_model_spec(spec)
    total, _ = integrate.quad(lambda x: model.oracle_p(x, 1.0), 0.0, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)
    assert total == pytest.approx(1.0, rel=1e-8)


def test_tail_convolution_closed_forms():
    # (U⁺)^{∗n} 的闭式与直接积分一致
    x = 1.7
    inner = lambda z: integrate.quad(lambda y: ig_unit_tail(y) * ig_unit_tail(z - y), 0.0, z, limit=200)[0]  # noqa: E731
    cube, _ = integrate.quad(lambda y: ig_unit_tail(y) * inner(x - y), 0.0, x, limit=100, epsrel=1e-9)
    assert ig_tail_conv_cube(x) == pytest.approx(cube, rel=1e-6)
    alpha = 0.5
    two, _ = integrate.quad(lambda y: stable_tail_conv_power(1, y, alpha) * stable_tail_conv_power(1, x - y, alpha),
                            0.0, x, limit=200)
    assert stable_tail_conv_power(2, x, alpha) == pytest.approx(two, rel=1e-6)


def test_user_model_numeric_completion():
    logger.info("=== 测试只给出 Lévy 密度的用户模型 ===")
    gamma_user = from_levy_density("gamma-user", lambda x: np.exp(-x) / x, 0.0, tail_decay_rate=1.0)
    assert gamma_user.tail(1.0) == pytest.approx(0.21938393439552029, rel=1e-9)
    assert gamma_user.cumulant(1.0) == pytest.approx(-math.log(2.0), rel=1e-9)
    assert complex(gamma_user.cumulant(1.0 + 2.0j)) == pytest.approx(-np.log(2.0 + 2.0j), rel=1e-9)
    assert complex(gamma_user.kappa_derivative(1, 1.0)) == pytest.approx(-0.5, rel=1e-9)
    assert gamma_user.cumulant_derivative is None and gamma_user.oracle_u_n is None

    ig_user = from_levy_density("ig-user", ig_levy, 0.5, tail_decay_rate=0.5,
                                stable_part=(1.0 / _SQRT_2PI, 0.5), remainder_exponent=-0.5)
    assert ig_user.cumulant(1.0) == pytest.approx(1.0 - math.sqrt(3.0), rel=1e-9)
    assert ig_user.tail(2.0) == pytest.approx(ig_unit_tail(2.0), rel=1e-9)
    assert check_model_consistency(ig_user, grid=[0.2, 0.5, 1.0, 2.0]).ok


def test_numeric_tail_and_cumulant_match_closed_forms():
    ig, gamma = make_ig(), make_gamma()
    for x in (0.3, 1.0, 4.0):
        assert tail_numeric(ig, x) == pytest.approx(ig.tail(x), rel=1e-9)
    for theta in (0.5, 2.0, 1.0 + 3.0j):
        assert cumulant_numeric(gamma, theta) == pytest.approx(complex(gamma.cumulant(theta)), rel=1e-8)
        assert cumulant_numeric(ig, theta) == pytest.approx(complex(ig.cumulant(theta)), rel=1e-8)
    assert cumulant_numeric(ig, 0.0) == 0
    with pytest.raises(DomainError):
        tail_numeric(ig, 0.0)
    with pytest.raises(DomainError):
        cumulant_numeric(ig, -1.0)


def test_stable_series_density():
    logger.info("=== 测试稳定分布的级数密度 ===")
    # α = 1/2 时 p(x; t) = t x^{-3/2} e^{-t²/(4x)} / (2√π)
    for x, t in ((1.0, 1.0), (0.5, 0.4), (3.0, 2.0)):
        value, bound = stable_series_density(x, t, 0.5)
        expected = t * x ** -1.5 * math.exp(-t * t / (4.0 * x)) / (2.0 * math.sqrt(math.pi))
        assert value == pytest.approx(expected, rel=1e-9)
        assert bound < 1e-9
    assert stable_series_density(1.0, 0.0, 0.3) == (0.0, 0.0)
    with pytest.raises(DomainError):
        stable_series_density(0.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        stable_series_density(1.0, -1.0, 0.5)


def test_user_model_validation():
    with pytest.raises(DomainError):
        from_levy_density("bad", ig_levy, 1.0)
    with pytest.raises(DomainError):
        from_levy_density("bad", ig_levy, 0.5, stable_part=(-1.0, 0.5))
    model = from_levy_density("ok", ig_levy, 0.5, tail_decay_rate=0.5)
    with pytest.raises(DomainError):
        kappa_derivative_numeric(model, 1, -0.5)
    with pytest.raises(DomainError):
        kappa_derivative_numeric(model, 0, 1.0)


if __name__ == "__main__":
    pytest.main([__file__])
