#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
特殊函数内核测试：恒等式、已知值与 Bell 递推
"""

import logging
import math

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from subordinatorDensity.errors import DomainError
from subordinatorDensity.numerics.specfun import (
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

logger = logging.getLogger("test_specfun")


def test_recip_gamma_examples():
    assert recip_gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert recip_gamma(-2.0) == 0.0
    assert recip_gamma(0.0) == 0.0
    assert recip_gamma(-0.5) == pytest.approx(-1.0 / (2.0 * math.sqrt(math.pi)), rel=1e-12)


@given(st.floats(min_value=-5.0, max_value=5.0).filter(lambda z: abs(z - round(z)) > 1e-3))
@settings(deadline=None, max_examples=100)
def test_recip_gamma_reflection(z):
    lhs = recip_gamma(z) * recip_gamma(1.0 - z)
    assert lhs == pytest.approx(math.sin(math.pi * z) / math.pi, rel=1e-10, abs=1e-14)


@given(st.floats(min_value=-4.5, max_value=6.0).filter(lambda z: abs(z - round(z)) > 1e-3))
@settings(deadline=None, max_examples=60)
def test_recip_gamma_recurrence_and_scipy(z):
    assert recip_gamma(z + 1.0) == pytest.approx(recip_gamma(z) / z, rel=1e-12)
    assert recip_gamma(z) == pytest.approx(sc.rgamma(z), rel=1e-12, abs=1e-300)


def test_complex_gamma_against_scipy():
    for z in (0.3 + 2j, -1.7 + 0.5j, 4.0 - 3j, -0.5 + 0.01j):
        assert abs(gamma(z) - sc.gamma(z)) <= 1e-11 * abs(sc.gamma(z))
        assert abs(np.exp(log_gamma(z)) - sc.gamma(z)) <= 1e-11 * abs(sc.gamma(z))


def test_erfc():
    assert erfc(0.0) == pytest.approx(1.0, rel=1e-15)
    assert erfc(40.0) <= 1e-300
    assert erfc(1.0) == pytest.approx(0.1572992070502851, rel=1e-10)
    for x in np.linspace(-6.0, 6.0, 49):
        assert erfc(x) + erfc(-x) == pytest.approx(2.0, rel=1e-14)
        assert erfc(x) == pytest.approx(sc.erfc(x), rel=1e-12, abs=1e-300)
    xs = np.linspace(-3.0, 3.0, 61)
    values = [erfc(x) for x in xs]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_exp_integral_e1():
    assert exp_integral_e1(1.0) == pytest.approx(0.21938393439552029, rel=1e-10)
    x = 1e-8
    assert exp_integral_e1(x) + math.log(x) == pytest.approx(-EULER_GAMMA, abs=1e-7)
    v = exp_integral_e1(10.0)
    assert math.exp(-10.0) / 11.0 <= v <= math.exp(-10.0) / 10.0
    for x in (0.01, 0.5, 2.0, 5.0, 30.0):
        assert exp_integral_e1(x) == pytest.approx(sc.exp1(x), rel=1e-12)
    with pytest.raises(DomainError):
        exp_integral_e1(0.0)


def test_hermite_examples_and_poly():
    assert hermite(0, 2.5) == 1.0
    assert hermite(1, 3.0) == 6.0
    assert hermite(3, 1.0) == -4.0
    for n in range(8):
        poly = hermite_poly(n)
        assert isinstance(poly, PolySeq)
        assert poly.degree == n
        for x in (-1.5, 0.0, 0.7, 2.0):
            assert poly(x) == pytest.approx(hermite(n, x), rel=1e-13, abs=1e-12)


def test_hermite_against_scipy_and_recurrence():
    xs = np.linspace(-10.0, 10.0, 21)
    for n in range(21):
        ours = hermite(n, xs)
        ref = sc.eval_hermite(n, xs)
        assert np.allclose(ours, ref, rtol=1e-9, atol=1e-9)
    for n in range(1, 20):
        for x in (-3.0, 0.5, 4.0):
            lhs = hermite(n + 1, x)
            rhs = 2 * x * hermite(n, x) - 2 * n * hermite(n - 1, x)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


@given(st.floats(min_value=-2.0, max_value=2.0), st.floats(min_value=-0.5, max_value=0.5))
@settings(deadline=None, max_examples=50)
def test_hermite_generating_function(x, t):
    total = sum(hermite(n, x) * t ** n / math.factorial(n) for n in range(21))
    next_term = abs(hermite(21, x) * t ** 21 / math.factorial(21))
    assert abs(total - math.exp(2 * x * t - t * t)) <= next_term + 1e-12


def test_polyseq_validation():
    with pytest.raises(ValueError):
        PolySeq(coefficients=[1.0, 2.0], degree=2)
    with pytest.raises(ValueError):
        PolySeq(coefficients=[1.0, 0.0], degree=1)
    assert PolySeq(coefficients=[0.0], degree=0)(3.0) == 0.0


def test_bell_examples():
    assert bell_partial(4, 1, [1, 2, 3, 4]) == 4
    assert bell_partial(3, 3, [2]) == 8
    assert bell_partial(3, 2, [2, 5]) == 30
    assert bell_complete(0, []) == 1
    assert bell_complete(1, [7]) == 7
    assert bell_complete(2, [1, 1]) == 2
    with pytest.raises(DomainError):
        bell_partial(3, 4, [1, 2, 3])
    with pytest.raises(DomainError):
        bell_partial(3, 0, [1, 2, 3])


@given(st.integers(min_value=1, max_value=8),
       st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=8, max_size=8))
@settings(deadline=None, max_examples=60)
def test_bell_partial_rows_sum_to_complete(n, args):
    table = bell_partial_table(n, args)
    assert math.fsum(table[n][k] for k in range(1, n + 1)) == pytest.approx(
        bell_complete(n, args), rel=1e-10, abs=1e-10)


def test_bell_table_on_arrays():
    x1 = np.array([1.0 + 1j, 2.0, -0.5j])
    x2 = np.array([0.5, -1.0, 3.0 + 0j])
    table = bell_partial_table(3, [x1, x2, 0 * x1])
    assert np.allclose(table[3][2], 3 * x1 * x2)
    assert np.allclose(table[3][3], x1 ** 3)


def test_recip_gamma_taylor_coeffs():
    c = recip_gamma_taylor_coeffs(12)
    assert c[0] == pytest.approx(1.0)
    assert c[1] == pytest.approx(EULER_GAMMA, rel=1e-14)
    assert c[2] == pytest.approx(EULER_GAMMA ** 2 / 2 - math.pi ** 2 / 12, rel=1e-13)
    z = 0.3
    series = sum(ck * z ** k for k, ck in enumerate(c))
    assert series == pytest.approx(sc.rgamma(1 + z), rel=1e-10)
    with pytest.raises(DomainError):
        recip_gamma_taylor_coeffs(21)


def test_zeta_and_falling_factorial():
    for n in range(2, 21):
        assert zeta_int(n) == pytest.approx(sc.zeta(n), rel=1e-14)
    with pytest.raises(DomainError):
        zeta_int(1)
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(0.5, 2) == pytest.approx(-0.25)
    assert falling_factorial(2.0, 0) == 1


if __name__ == "__main__":
    pytest.main([__file__])
