#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
方法 M2：尾积分卷积
    uₙ(x) = (−1)ⁿ dⁿ/dxⁿ (U⁺)^{∗n}(x)
两条路线：
- 卷积幂加中心差分（交叉验证用）
- 阻尼反演 uₙ(x) = (−1)^m x^{−m} (1/2πi)∫ λₙ^{(m)}(θ)e^{θx}dθ，λₙ = κⁿ（参考实现）
"""

import logging
import math
from collections import OrderedDict
from typing import Any, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.settings import GridConfig, InversionDefaults, QuadratureConfig
from ..errors import BellOverflowError, DerivativeInstabilityError, DomainError
from ..models.base import SubordinatorModel, central_derivative, kappa_derivative_numeric
from ..numerics.grids import ConvolutionPowers
from ..numerics.quadrature import IntegralResult, bromwich_integral, integrate_semi_infinite
from ..numerics.specfun import bell_partial_table

logger = logging.getLogger("subordinatorDensity.methods.tail_conv")

_CACHE_SIZE = 16


class DampedInversionPlan(BaseModel):
    """
    阻尼反演参数

    Args:
        n: 系数阶数
        m: 阻尼阶数，至少 n + 2，缺省为 n + 3
        c: 竖线横坐标，缺省按阻尼被积函数的鞍点取 max(增长率 + 1, m/x)
        derivative_source: κ 导数取闭式还是数值积分
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    m: Optional[int] = Field(None, ge=3)
    c: Optional[float] = None
    derivative_source: Literal["closed_form", "numeric_integral"] = "closed_form"

    @model_validator(mode="before")
    @classmethod
    def _default_damping(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("m") is None and data.get("n") is not None:
            data = {**data, "m": int(data["n"]) + 3}
        return data

    @model_validator(mode="after")
    def _check_damping(self) -> "DampedInversionPlan":
        if self.m < self.n + 2:
            raise ValueError(f"阻尼阶数 m = {self.m} 必须 ≥ n + 2 = {self.n + 2}")
        return self

    @classmethod
    def from_defaults(cls, n: int, defaults: Optional[InversionDefaults] = None) -> "DampedInversionPlan":
        defaults = defaults or InversionDefaults()
        return cls(n=n, m=n + defaults.extra_damping, c=defaults.c, derivative_source=defaults.derivative_source)

    def abscissa(self, model: SubordinatorModel, x: float) -> float:
        c = self.c if self.c is not None else max(model.growth_rate + 1.0, self.m / x)
        if c <= model.growth_rate:
            raise DomainError(f"竖线横坐标 c = {c} 必须大于增长率 {model.growth_rate}")
        return c


_tail_powers: "OrderedDict[tuple, ConvolutionPowers]" = OrderedDict()


def tail_powers(model: SubordinatorModel, grid: Optional[GridConfig] = None) -> ConvolutionPowers:
    """模型尾积分 U⁺ 的卷积幂（按模型与网格配置复用）"""
    grid = grid or GridConfig()
    key = (id(model), grid)
    cached = _tail_powers.get(key)
    if cached is not None and cached.kernel is model.tail:
        _tail_powers.move_to_end(key)
        return cached
    powers = ConvolutionPowers(model.tail, model.quadrature, grid, x_max=4.0,
                               kernel_exponent=model.tail_exponent, name=f"{model.label} U⁺")
    _tail_powers[key] = powers
    while len(_tail_powers) > _CACHE_SIZE:
        _tail_powers.popitem(last=False)
    return powers


def tail_conv_power(model: SubordinatorModel, n: int, x: float, grid: Optional[GridConfig] = None) -> float:
    """(U⁺)^{∗n}(x)；n = 1 时就是 U⁺(x)"""
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    return tail_powers(model, grid).power(n, x)


def u_n_via_derivative_result(model: SubordinatorModel, n: int, x: float, step: Optional[float] = None,
                              rel_tol: float = 1e-4, grid: Optional[GridConfig] = None) -> IntegralResult:
    """
    (−1)ⁿ dⁿ/dxⁿ (U⁺)^{∗n}(x)，步长 h 与 h/2 的 Richardson 组合并给出两者之差作为误差

    Raises:
        DerivativeInstabilityError: 两个步长的估计之差超过 rel_tol·尺度，尺度取 max(|值|, (U⁺)^{∗n}(x)/xⁿ)
    """
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    powers = tail_powers(model, grid)
    value, error = central_derivative(lambda z: powers.power(n, z), n, x, step)
    value *= (-1.0) ** n
    scale = max(abs(value), abs(powers.power(n, x)) / x ** n)
    if error > rel_tol * scale:
        raise DerivativeInstabilityError(
            f"{model.label} u_{n}({x:g}) 的差分估计不稳定: 两步长之差 {error:.3e} 超过 {rel_tol:g}×{scale:.3e}",
            best_estimate=value, error_estimate=error)
    logger.debug(f"{model.label} u_{n}({x:g}) 差分路线 = {value:.12g} ± {error:.2e}")
    return IntegralResult(value=value, error_estimate=error, evaluations=4 * (n + 1))


def u_n_via_derivative(model: SubordinatorModel, n: int, x: float, step: Optional[float] = None,
                       grid: Optional[GridConfig] = None) -> float:
    return float(u_n_via_derivative_result(model, n, x, step, grid=grid).value.real)


def _kappa_derivatives(model: SubordinatorModel, m: int, theta: Any, source: str,
                       cfg: Optional[QuadratureConfig]) -> List[Any]:
    if source == "closed_form":
        return [model.kappa_derivative(k, theta) for k in range(1, m + 1)]
    arr = np.asarray(theta, dtype=complex)
    flat = arr.ravel()
    # 每个节点的各阶导数只算一次
    table = np.array([[kappa_derivative_numeric(model, k, th, cfg) for k in range(1, m + 1)] for th in flat])
    return [table[:, k].reshape(arr.shape) if arr.ndim else complex(table[0, k]) for k in range(m)]


def _lambda_derivative_parts(model: SubordinatorModel, n: int, m: int, theta: Any, source: str,
                             cfg: Optional[QuadratureConfig]) -> Tuple[Any, Any]:
    """Faà di Bruno 展开的和与各项绝对值之和（后者是逐点舍入的量级）"""
    if n < 1 or m < 0:
        raise DomainError(f"需要 n ≥ 1, m ≥ 0，收到 n = {n}, m = {m}")
    kappa = model.cumulant(theta)
    if m == 0:
        value = kappa ** n
        return value, np.abs(value)
    derivs = _kappa_derivatives(model, m, theta, source, cfg)
    bell = bell_partial_table(m, derivs)
    total: Any = 0.0
    magnitude: Any = 0.0
    for j in range(1, min(m, n) + 1):
        weight = math.factorial(n) // math.factorial(n - j)
        term = weight * kappa ** (n - j) * bell[m][j]
        total = total + term
        magnitude = magnitude + np.abs(term)
    if not np.all(np.isfinite(total)):
        raise BellOverflowError(f"{model.label} λ_{n}^({m}) 的 Faà di Bruno 展开溢出")
    return total, magnitude


def lambda_derivative(model: SubordinatorModel, n: int, m: int, theta: Any,
                      source: str = "closed_form", cfg: Optional[QuadratureConfig] = None) -> Any:
    """
    λₙ^{(m)}(θ) = dᵐ/dθᵐ κ(θ)ⁿ = Σ_{j=1}^{min(m,n)} n!/(n−j)! κ^{n−j} B_{m,j}(κ′, …, κ^{(m−j+1)})

    n 较大时各项相消严重，参见 _lambda_derivative_parts 给出的量级。

    Raises:
        BellOverflowError: 展开中出现非有限值
    """
    return _lambda_derivative_parts(model, n, m, theta, source, cfg)[0]


def u_n_via_damped_inversion_result(model: SubordinatorModel, plan: DampedInversionPlan, x: float,
                                    cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """
    uₙ(x) = (−1)^m x^{−m}·(1/2πi)∫_{c−i∞}^{c+i∞} λₙ^{(m)}(θ)e^{θx}dθ

    误差估计含舍入下限：展开各项的绝对值按 m 次舍入计入，再乘 x^{−m}e^{cx}。
    n ≳ 15 时它通常远大于积分误差。
    """
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    cfg = cfg or model.quadrature
    c = plan.abscissa(model, x)
    n, m = plan.n, plan.m

    def integrand(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        value, magnitude = _lambda_derivative_parts(model, n, m, theta, plan.derivative_source, cfg)
        return value, m * magnitude

    line = bromwich_integral(integrand, c, x, cfg, with_magnitude=True)
    scale = (-1.0) ** m * x ** (-m)
    value = scale * line.value.real
    error = abs(scale) * line.error_estimate
    logger.debug(f"{model.label} u_{n}({x:g}) 阻尼反演 (m = {m}, c = {c:.4g}) = {value:.12g} ± {error:.2e}")
    return IntegralResult(value=value, error_estimate=error, evaluations=line.evaluations,
                          imag_residual=abs(scale) * line.imag_residual)


def u_n_via_damped_inversion(model: SubordinatorModel, plan: DampedInversionPlan, x: float,
                             cfg: Optional[QuadratureConfig] = None) -> float:
    return float(u_n_via_damped_inversion_result(model, plan, x, cfg).value.real)


def laplace_identity_residual(model: SubordinatorModel, n: int, theta: float,
                              grid: Optional[GridConfig] = None) -> float:
    """|∫₀^∞ e^{−θx}(U⁺)^{∗n}(x)dx − (−κ(θ)/θ)ⁿ| / |(−κ(θ)/θ)ⁿ|"""
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    if theta <= max(model.growth_rate, 0.0):
        raise DomainError(f"θ = {theta} 必须为正且大于增长率 {model.growth_rate}")
    powers = tail_powers(model, grid)
    s = powers.power_exponent(n) if n > 1 else model.tail_exponent
    cfg = model.quadrature.with_hints(s if s is not None and s < 0 else None, None)
    # (U⁺)^{∗n} 的指数衰减带多项式因子，只借用一半的衰减率
    decay = theta + 0.5 * (model.tail_decay_rate or 0.0)
    lhs = integrate_semi_infinite(lambda z: math.exp(-theta * z) * powers.power(n, z), 0.0, decay, cfg).value.real
    rhs = (-complex(model.cumulant(theta)).real / theta) ** n
    residual = abs(lhs - rhs) / abs(rhs)
    logger.info(f"{model.label} Laplace 恒等式 n = {n}, θ = {theta:g}: 左 {lhs:.12g}, 右 {rhs:.12g}, 相对残差 {residual:.2e}")
    return residual


def lambda_decay_slope(model: SubordinatorModel, n: int, m: int, c: float, radii: Sequence[float]) -> float:
    """|λₙ^{(m)}(c + iy)| 在 y ∈ radii 上的双对数最小二乘斜率"""
    y = np.asarray(list(radii), dtype=float)
    if y.size < 2 or np.any(y <= 0):
        raise DomainError("斜率拟合需要至少两个正的半径")
    values = np.abs(lambda_derivative(model, n, m, c + 1j * y))
    slope = float(np.polyfit(np.log(y), np.log(values), 1)[0])
    logger.info(f"{model.label} |λ_{n}^({m})| 衰减斜率 {slope:.4f} (对照 −(m − n) = {-(m - n)})")
    return slope
