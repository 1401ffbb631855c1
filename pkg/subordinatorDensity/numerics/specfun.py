#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
特殊函数内核
倒数 Gamma（复平面）、erfc、指数积分 E1 与 ζ 取自 scipy.special，Hermite 多项式取自 numpy.polynomial；
Bell 多项式与 1/Γ(1+z) 的 Taylor 系数在此递推。所有函数都是纯函数。
"""

import math
from numbers import Integral, Real
from typing import Any, List, Sequence, Union

import numpy as np
import scipy.special as sc
from numpy.polynomial import hermite as npherm
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DomainError

Number = Union[int, float, complex]

EULER_GAMMA = float(np.euler_gamma)

# 更高阶时 Bell 递推的相消超过双精度
_TAYLOR_MAX_ORDER = 20


def _is_nonpositive_integer(z: Number) -> bool:
    w = complex(z)
    return w.imag == 0.0 and w.real <= 0.0 and w.real == math.floor(w.real)


def recip_gamma(z: Number) -> Number:
    """
    倒数 Gamma 函数 1/Γ(z)，在非正整数处精确为 0

    Args:
        z: 任意有限实数或复数

    Returns:
        实数输入返回 float，复数输入返回 complex
    """
    real_input = isinstance(z, Real)
    if _is_nonpositive_integer(z):
        return 0.0 if real_input else 0j
    if real_input:
        return float(sc.rgamma(float(z)))
    return complex(sc.rgamma(complex(z)))


def gamma(z: Number) -> Number:
    """Γ(z)，在极点处抛出 DomainError"""
    if _is_nonpositive_integer(z):
        raise DomainError(f"Γ 在 z = {z} 处有极点")
    if isinstance(z, Real):
        return float(sc.gamma(float(z)))
    return complex(sc.gamma(complex(z)))


def log_gamma(z: Number) -> complex:
    """log Γ(z) 的主分支（用于大参数时避免溢出）"""
    if _is_nonpositive_integer(z):
        raise DomainError(f"Γ 在 z = {z} 处有极点")
    return complex(sc.loggamma(complex(z)))


def erfc(x: float) -> float:
    """互补误差函数 erfc(x) = 1 − (2/√π)∫₀ˣ e^{−s²}ds"""
    return float(sc.erfc(float(x)))


def exp_integral_e1(x: float) -> float:
    """
    指数积分 E1(x) = ∫ₓ^∞ e^{−s}/s ds

    Raises:
        DomainError: x ≤ 0
    """
    x = float(x)
    if x <= 0.0:
        raise DomainError(f"E1 只在 x > 0 上定义，收到 x = {x}")
    return float(sc.exp1(x))


class PolySeq(BaseModel):
    """按升幂排列的多项式系数"""

    model_config = ConfigDict(frozen=True)

    coefficients: List[float] = Field(..., description="系数 a_0, a_1, …, a_degree")
    degree: int = Field(..., ge=0, description="次数")

    @model_validator(mode="after")
    def _check_shape(self) -> "PolySeq":
        if len(self.coefficients) != self.degree + 1:
            raise ValueError("系数个数必须等于 degree + 1")
        if self.degree > 0 and self.coefficients[-1] == 0:
            raise ValueError("首项系数不能为 0")
        return self

    def __call__(self, x: Any) -> Any:
        return np.polynomial.polynomial.polyval(x, self.coefficients)


def _hermite_unit(n: int) -> List[float]:
    if n < 0:
        raise DomainError(f"Hermite 次数必须非负，收到 n = {n}")
    return [0.0] * n + [1.0]


def hermite(n: int, x: Any) -> Any:
    """
    物理学家 Hermite 多项式 Hₙ(x)，支持复数与 numpy 数组

    Args:
        n: 非负整数次数
        x: 求值点
    """
    value = npherm.hermval(x, _hermite_unit(n))
    return value.item() if np.ndim(value) == 0 else value


def hermite_poly(n: int) -> PolySeq:
    """Hₙ 的系数表示"""
    return PolySeq(coefficients=[float(c) for c in npherm.herm2poly(_hermite_unit(n))], degree=n)


def bell_partial_table(n: int, args: Sequence[Any]) -> List[List[Any]]:
    """
    部分 Bell 多项式三角表 B[m][k]，0 ≤ k ≤ m ≤ n

    递推 B_{m,k} = Σ_{i=1}^{m−k+1} C(m−1, i−1)·x_i·B_{m−i,k−1}；
    参数可以是实数、复数或 numpy 数组（逐元素）。
    """
    if n < 0:
        raise DomainError(f"Bell 多项式阶数必须非负，收到 n = {n}")
    if len(args) < n:
        raise DomainError(f"Bell 多项式 B_{n},k 至少需要 {n} 个参数，收到 {len(args)}")
    table: List[List[Any]] = [[1.0]]
    for m in range(1, n + 1):
        row: List[Any] = [0.0]
        for k in range(1, m + 1):
            acc: Any = 0.0
            for i in range(1, m - k + 2):
                prev = table[m - i][k - 1] if k - 1 <= m - i else 0.0
                acc = acc + math.comb(m - 1, i - 1) * args[i - 1] * prev
            row.append(acc)
        table.append(row)
    return table


def bell_partial(n: int, k: int, args: Sequence[Any]) -> Any:
    """
    部分 Bell 多项式 B_{n,k}(x₁, …, x_{n−k+1})

    Raises:
        DomainError: k < 1 或 k > n，或参数不足
    """
    if k < 1 or k > n:
        raise DomainError(f"需要 1 ≤ k ≤ n，收到 n = {n}, k = {k}")
    if len(args) < n - k + 1:
        raise DomainError(f"B_{n},{k} 需要 {n - k + 1} 个参数")
    padded = list(args) + [0.0] * (n - len(args))
    return bell_partial_table(n, padded)[n][k]


def bell_complete(n: int, args: Sequence[Any]) -> Any:
    """
    完全 Bell 多项式 Yₙ，递推 Y_{m+1} = Σ_{i=0}^{m} C(m,i)·Y_{m−i}·x_{i+1}
    """
    if n < 0:
        raise DomainError(f"Bell 多项式阶数必须非负，收到 n = {n}")
    if len(args) < n:
        raise DomainError(f"Y_{n} 需要 {n} 个参数，收到 {len(args)}")
    y: List[Any] = [1.0]
    for m in range(n):
        acc: Any = 0.0
        for i in range(m + 1):
            acc = acc + math.comb(m, i) * y[m - i] * args[i]
        y.append(acc)
    return y[n]


def zeta_int(n: int) -> float:
    """整数点的 Riemann ζ(n)，n ≥ 2"""
    if not isinstance(n, Integral) or n < 2:
        raise DomainError(f"ζ(n) 只在整数 n ≥ 2 上使用，收到 n = {n}")
    return float(sc.zeta(n))


def recip_gamma_taylor_coeffs(n_max: int) -> List[float]:
    """
    1/Γ(1+z) = Σ cₙ zⁿ 的系数 c₀…c_{n_max}

    log(1/Γ(1+z)) = γz + Σ_{k≥2} (−1)^{k−1} ζ(k) z^k / k，指数化后
    cₙ = Yₙ(a₁, …, aₙ)/n!，a₁ = γ，a_k = (−1)^{k−1}(k−1)!ζ(k)
    """
    if n_max < 1:
        raise DomainError(f"n_max 必须为正，收到 {n_max}")
    if n_max > _TAYLOR_MAX_ORDER:
        raise DomainError(f"n_max 不能超过 {_TAYLOR_MAX_ORDER}")
    a = [EULER_GAMMA] + [(-1) ** (k - 1) * math.factorial(k - 1) * zeta_int(k) for k in range(2, n_max + 1)]
    return [bell_complete(n, a) / math.factorial(n) for n in range(n_max + 1)]


def falling_factorial(a: Any, k: int) -> Any:
    """下降阶乘 a(a−1)…(a−k+1)，k = 0 时为 1"""
    result: Any = 1.0
    for j in range(k):
        result = result * (a - j)
    return result
