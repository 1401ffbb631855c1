#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
方法 M3（κ 的解析延拓与双射线围道）测试
"""

import logging
import math

import numpy as np
import pytest

from subordinatorDensity.config.settings import ContourSpec
from subordinatorDensity.errors import CapabilityError, ContourError, DomainError
from subordinatorDensity.methods.contour import (
    ContinuedCumulant,
    continuation_decay_profile,
    continue_cumulant,
    cumulant_on_contour,
    p_bromwich,
    p_contour,
    p_t_derivative_contour,
    u_n_contour,
)
from subordinatorDensity.models import StableParams, from_levy_density, make_gamma, make_ig, make_stable, parse_model_spec

logger = logging.getLogger("test_contour")

_SQRT_2PI = math.sqrt(2.0 * math.pi)
SPEC = ContourSpec()


@pytest.fixture(scope="module")
def ig():
    return make_ig()


@pytest.fixture(scope="module")
def gamma():
    return make_gamma()


def test_generic_continuation_matches_closed_form(ig):
    logger.info("=== 测试通用延拓 ===")
    generic = continue_cumulant(ig, generic=True)
    closed = continue_cumulant(ig)
    assert generic.generic and not closed.generic
    assert generic.offset == pytest.approx(-1.0, rel=1e-8)
    assert generic.leading_coefficient == pytest.approx(-math.sqrt(2.0), rel=1e-12)
    for theta in (1.0, 2.0 + 3.0j, -0.5 + 2.0j, 0.3 - 1.5j):
        expected = 1.0 - np.sqrt(1.0 + 2.0 * complex(theta))
        assert abs(complex(generic(theta)) - expected) <= 1e-7 * abs(expected)
        assert complex(closed(theta)) == pytest.approx(expected, rel=1e-12)


def test_generic_continuation_of_stable_law():
    stable = make_stable(StableParams(alpha=0.7))
    cont = continue_cumulant(stable, generic=True)
    assert cont.offset == 0.0
    for theta in (1.0, -0.3 + 2.0j, 4.0 - 1.0j):
        expected = -complex(theta) ** 0.7
        assert complex(cont(theta)) == pytest.approx(expected, rel=1e-12)
        assert complex(cont.remainder(theta)) == pytest.approx(0.0, abs=1e-12)


def test_lambda_zero_is_computed_lazily_and_shared(monkeypatch):
    logger.info("=== 测试 λ(0) 的延迟计算 ===")
    calls = []
    original = ContinuedCumulant._lambda_zero

    def counting(self):
        calls.append(self.model.label)
        return original(self)

    monkeypatch.setattr(ContinuedCumulant, "_lambda_zero", counting)
    model = make_ig()
    closed = cumulant_on_contour(model, SPEC)
    closed(np.array([1.0 + 1.0j, 2.0 - 0.5j]))
    assert "offset" not in closed.__dict__
    assert calls == []
    first = continue_cumulant(model, generic=True)
    second = continue_cumulant(model, generic=True)
    assert first.offset == pytest.approx(-1.0, rel=1e-8)
    assert second.offset == first.offset
    assert len(calls) == 1


def test_continuation_on_arrays(ig):
    cont = continue_cumulant(ig)
    thetas = np.array([1.0 + 1.0j, 1.0 - 1.0j])
    values = np.asarray(cont(thetas))
    assert values.shape == (2,)
    assert values[0] == pytest.approx(np.conj(values[1]))


def test_continuation_errors(ig, gamma):
    with pytest.raises(DomainError):
        continue_cumulant(ig, psi=2.0)
    with pytest.raises(DomainError):
        continue_cumulant(ig, psi=0.0)
    with pytest.raises(CapabilityError) as info:
        continue_cumulant(gamma, generic=True)
    assert info.value.exit_code == 3
    user = from_levy_density("user", lambda x: np.exp(-x) / x, 0.0, tail_decay_rate=1.0)
    with pytest.raises(CapabilityError):
        continue_cumulant(user)
    with pytest.raises(CapabilityError):
        continue_cumulant(gamma).remainder(1.0)
    with pytest.raises(ContourError):
        cumulant_on_contour(ig, ContourSpec(c=0.0))


def test_generic_continuation_rejects_points_outside_cone(ig):
    cont = continue_cumulant(ig, psi=0.3, generic=True)
    with pytest.raises(ContourError):
        cont(-3.0 + 0.5j)


def test_remainder_decays_along_rays(ig):
    logger.info("=== 测试延拓余项沿射线的衰减 ===")
    cont = continue_cumulant(ig)
    # λ(θ) = √2(√θ − √(θ + 1/2))
    theta = 2.0 + 1.0j
    expected = math.sqrt(2.0) * (np.sqrt(theta) - np.sqrt(theta + 0.5))
    assert complex(cont.remainder(theta)) == pytest.approx(expected, rel=1e-8)
    profile = continuation_decay_profile(cont, SPEC, np.geomspace(2.0, 1e3, 8))
    assert profile.decreasing
    assert profile.upper == pytest.approx(profile.lower, rel=1e-12)
    assert profile.upper[-1] < 0.1 * profile.upper[0]


@pytest.mark.parametrize("spec,x", [("ig", 0.5), ("ig", 2.0), ("gamma", 1.0), ("stable:alpha=0.3", 1.0),
                                    ("stable:alpha=0.7", 0.4)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_u_n_contour_matches_oracle(spec, x, n):
    logger.info(f"=== 测试围道系数: {spec}, n = {n}, x = {x} ===")
    model = parse_model_spec(spec)
    assert u_n_contour(model, SPEC, n, x) == pytest.approx(model.oracle_u_n(n, x), rel=1e-8)


def test_u_n_contour_errors(ig):
    with pytest.raises(DomainError):
        u_n_contour(ig, SPEC, 0, 1.0)
    with pytest.raises(DomainError):
        u_n_contour(ig, SPEC, 1, 0.0)


@pytest.mark.slow
def test_u_n_contour_with_generic_continuation():
    ig = make_ig()
    user = from_levy_density("ig-user", lambda x: np.power(x, -1.5) * np.exp(-0.5 * x) / _SQRT_2PI, 0.5,
                             tail_decay_rate=0.5, stable_part=(1.0 / _SQRT_2PI, 0.5), remainder_exponent=-0.5,
                             levy_density_analytic=True)
    assert u_n_contour(user, SPEC, 2, 2.0) == pytest.approx(ig.oracle_u_n(2, 2.0), rel=1e-6)


def test_density_by_contour(ig, gamma):
    logger.info("=== 测试围道密度 ===")
    assert p_contour(ig, SPEC, 1.0, 1.0) == pytest.approx(1.0 / _SQRT_2PI, rel=1e-9)
    assert p_contour(gamma, SPEC, 1.0, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-9)
    assert p_contour(gamma, SPEC, 1.0, 0.5) == pytest.approx(gamma.oracle_p(1.0, 0.5), rel=1e-9)
    assert p_contour(ig, SPEC, 1.0, 0.0) == 0.0


def test_density_is_independent_of_opening_angle(ig):
    values = [p_contour(ig, ContourSpec(psi=psi), 0.8, 0.5) for psi in (0.3, 0.6, 0.9)]
    assert values[0] == pytest.approx(values[1], rel=1e-9)
    assert values[1] == pytest.approx(values[2], rel=1e-9)
    assert values[0] == pytest.approx(ig.oracle_p(0.8, 0.5), rel=1e-9)


INVARIANCE_SPECS = [ContourSpec(psi=0.3), ContourSpec(c=2.0), ContourSpec(nodes=96)]


@pytest.mark.parametrize("spec", ["ig", "stable:alpha=0.5", "stable:alpha=0.7"])
@pytest.mark.parametrize("variant", INVARIANCE_SPECS, ids=["psi", "corner", "nodes"])
def test_contour_results_do_not_depend_on_contour_shape(spec, variant):
    logger.info(f"=== 测试围道形状无关性: {spec}, {variant} ===")
    model = parse_model_spec(spec)
    for x in (0.5, 2.0):
        for n in (1, 2):
            base = u_n_contour(model, SPEC, n, x)
            # α = 1/2, n = 2 时 κ² = θ，系数恒为 0
            assert u_n_contour(model, variant, n, x) == pytest.approx(base, rel=1e-6, abs=1e-9)
        base = p_contour(model, SPEC, x, 1.0)
        assert p_contour(model, variant, x, 1.0) == pytest.approx(base, rel=1e-6)


def test_time_derivatives(ig):
    logger.info("=== 测试密度对 t 的导数 ===")
    x = 1.0
    for n in (1, 2):
        assert p_t_derivative_contour(ig, SPEC, x, 0.0, n) == pytest.approx(u_n_contour(ig, SPEC, n, x), rel=1e-14)
    t, h = 1.0, 1e-4
    numeric = (ig.oracle_p(x, t + h) - ig.oracle_p(x, t - h)) / (2.0 * h)
    assert p_t_derivative_contour(ig, SPEC, x, t, 1) == pytest.approx(numeric, rel=1e-6)
    with pytest.raises(DomainError):
        p_t_derivative_contour(ig, SPEC, x, t, -1)


def test_bromwich_density(ig, gamma):
    logger.info("=== 测试竖线反演密度 ===")
    assert p_bromwich(ig, 1.0, 1.0) == pytest.approx(1.0 / _SQRT_2PI, rel=1e-8)
    assert p_bromwich(ig, 2.0, 0.5) == pytest.approx(ig.oracle_p(2.0, 0.5), rel=1e-8)
    assert p_bromwich(gamma, 1.0, 5.0) == pytest.approx(math.exp(-1.0) / 24.0, rel=1e-8)
    assert p_bromwich(ig, 1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        p_bromwich(ig, 1.0, -1.0)
    with pytest.raises(DomainError):
        p_bromwich(ig, 1.0, 1.0, c=0.0)
    with pytest.raises(DomainError):
        p_bromwich(ig, 0.0, 1.0)


if __name__ == "__main__":
    pytest.main([__file__])
