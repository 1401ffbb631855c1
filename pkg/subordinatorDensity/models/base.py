#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
从属子模型抽象
SubordinatorModel 打包 Lévy 密度 u、尾积分 U⁺、累积量函数 κ 及其导数、可选的解析延拓与闭式参照解。
只给出 u 的用户模型通过数值积分补齐其余部分。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import QuadratureConfig
from ..errors import DomainError
from ..numerics.quadrature import integrate_complex, integrate_finite, integrate_semi_infinite, integrate_to_infinity

logger = logging.getLogger("subordinatorDensity.models")

ArrayLike = Any


def complex_power(theta: ArrayLike, p: float) -> ArrayLike:
    """主值分支的 θ^p，割线沿负实轴；θ = 0 处 p > 0 时为 0"""
    z = np.asarray(theta, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(p * np.log(z))
    out = np.where(z == 0, 0.0 if p > 0 else np.inf, out)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SubordinatorModel:
    """
    无穷活动、纯跳跃、无漂移的从属子

    levy_density 对实数 x > 0 返回非负实数；levy_density_analytic 为 True 时它也接受锥内复数。
    cumulant、cumulant_derivative、continuation 都接受标量或 numpy 复数组。
    density_exponent(t) 给出 p(x; t) 在原点附近 x^s 行为中的 s，未知时为 None。
    """

    name: str
    levy_density: Callable[[Any], Any]
    tail: Callable[[float], float]
    cumulant: Callable[[Any], Any]
    small_jump_index: float
    cumulant_derivative: Optional[Callable[[int, Any], Any]] = None
    continuation: Optional[Callable[[Any], Any]] = None
    stable_part: Optional[Tuple[float, float]] = None
    remainder_exponent: Optional[float] = None
    growth_rate: float = 0.0
    tail_decay_rate: Optional[float] = None
    levy_density_derivative: Optional[Callable[[int, float], float]] = None
    levy_density_analytic: bool = False
    oracle_u_n: Optional[Callable[[int, float], float]] = None
    oracle_p: Optional[Callable[[float, float], float]] = None
    oracle_max_order: Optional[int] = None
    density_exponent: Optional[Callable[[float], float]] = None
    params: Dict[str, float] = field(default_factory=dict)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}:" + ",".join(f"{k}={v:g}" for k, v in self.params.items())

    @property
    def levy_exponent(self) -> Optional[float]:
        """u 在原点附近 x^s 行为中的 s"""
        return -1.0 - self.small_jump_index

    @property
    def tail_exponent(self) -> Optional[float]:
        """U⁺ 在原点附近 x^s 行为中的 s；对数奇异性返回 None"""
        return -self.small_jump_index if self.small_jump_index > 0 else None

    def kappa_derivative(self, k: int, theta: Any) -> Any:
        """κ^{(k)}(θ)：有闭式时用闭式，否则数值积分"""
        if k < 1:
            raise DomainError(f"导数阶数必须 ≥ 1，收到 k = {k}")
        if self.cumulant_derivative is not None:
            return self.cumulant_derivative(k, theta)
        return _vectorized(lambda th: kappa_derivative_numeric(self, k, th), theta)

    def levy_derivative(self, k: int, x: float, step: Optional[float] = None) -> float:
        """u^{(k)}(x)：有闭式时用闭式，否则用 Richardson 加密的中心差分"""
        if k == 0:
            return float(np.real(self.levy_density(x)))
        if self.levy_density_derivative is not None:
            return float(self.levy_density_derivative(k, x))
        return central_derivative(lambda y: float(np.real(self.levy_density(y))), k, x, step)[0]


def _vectorized(func: Callable[[complex], complex], theta: Any) -> Any:
    arr = np.asarray(theta, dtype=complex)
    if arr.ndim == 0:
        return func(complex(arr))
    return np.vectorize(func, otypes=[complex])(arr)


def central_derivative(f: Callable[[float], float], k: int, x: float,
                       step: Optional[float] = None) -> Tuple[float, float]:
    """
    k 阶中心差分，步长 h 与 h/2 的 Richardson 组合

    Returns:
        (导数估计, 两个步长估计之差)
    """
    h = step or 0.05 * x
    if h <= 0 or x - 0.5 * k * h <= 0:
        raise DomainError(f"差分模板越过原点: x = {x}, k = {k}, h = {h}")

    def stencil(hh: float) -> float:
        total = 0.0
        for j in range(k + 1):
            total += (-1) ** j * math.comb(k, j) * f(x + (0.5 * k - j) * hh)
        return total / hh ** k

    coarse = stencil(h)
    fine = stencil(0.5 * h)
    # 中心差分误差按 h² 展开
    value = fine + (fine - coarse) / 3.0
    return value, abs(fine - coarse) / 3.0


def _semi_infinite_complex(f: Callable[[float], complex], decay: float, cfg: QuadratureConfig) -> complex:
    re = integrate_semi_infinite(lambda y: f(y).real, 0.0, decay, cfg).value.real
    im = integrate_semi_infinite(lambda y: f(y).imag, 0.0, decay, cfg).value.real
    return complex(re, im)


def _decay_for(model: SubordinatorModel, theta: complex) -> Optional[float]:
    rate = theta.real + (model.tail_decay_rate or 0.0)
    return rate if rate > 0 else None


def kappa_derivative_numeric(model: SubordinatorModel, k: int, theta: complex,
                             cfg: Optional[QuadratureConfig] = None) -> complex:
    """
    κ^{(k)}(θ) = (−1)^k ∫₀^∞ e^{−θx} x^k u(x) dx

    Raises:
        DomainError: Re θ 不大于增长率，或 k < 1
        QuadratureNonConvergence: 积分未收敛
    """
    theta = complex(theta)
    if k < 1:
        raise DomainError(f"导数阶数必须 ≥ 1，收到 k = {k}")
    if theta.real < model.growth_rate or (theta.real == model.growth_rate and model.growth_rate > 0):
        raise DomainError(f"Re θ = {theta.real} 必须大于增长率 {model.growth_rate}")
    exponent = k - 1.0 - model.small_jump_index
    if exponent <= -1.0:
        raise DomainError(f"k = {k} 不足以抵消原点奇异性 (α₀ = {model.small_jump_index})")
    cfg = (cfg or model.quadrature).with_hints(exponent if exponent < 0 else None, None)
    sign = -1.0 if k % 2 else 1.0

    def integrand(y: float) -> complex:
        return complex(np.exp(-theta * y) * y ** k * np.real(model.levy_density(y)))

    decay = _decay_for(model, theta)
    if decay is not None:
        return sign * _semi_infinite_complex(integrand, decay, cfg)
    re = integrate_to_infinity(lambda y: integrand(y).real, 0.0, cfg).value.real
    im = integrate_to_infinity(lambda y: integrand(y).imag, 0.0, cfg).value.real
    return sign * complex(re, im)


def tail_numeric(model: SubordinatorModel, x: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """U⁺(x) = ∫ₓ^∞ u(y)dy"""
    if x <= 0:
        raise DomainError(f"尾积分要求 x > 0，收到 x = {x}")
    cfg = (cfg or model.quadrature).with_hints(None, None)

    def u(y: float) -> float:
        return float(np.real(model.levy_density(y)))

    if model.tail_decay_rate:
        return integrate_semi_infinite(u, x, model.tail_decay_rate, cfg).value.real
    return integrate_to_infinity(u, x, cfg).value.real


def cumulant_numeric(model: SubordinatorModel, theta: complex, cfg: Optional[QuadratureConfig] = None) -> complex:
    """
    κ(θ) = ∫₀^∞ (e^{−θx} − 1)u(x)dx，在 1 处拆分：
    ∫₀¹ (e^{−θx} − 1)u dx + ∫₁^∞ e^{−θx}u dx − U⁺(1)
    """
    theta = complex(theta)
    if theta == 0:
        return 0j
    if theta.real < 0:
        raise DomainError(f"累积量积分要求 Re θ ≥ 0，收到 θ = {theta}")
    cfg = cfg or model.quadrature
    s0 = -model.small_jump_index if model.small_jump_index > 0 else None

    def head(y: float) -> complex:
        return complex(np.expm1(-theta * y) * np.real(model.levy_density(y)))

    head_cfg = cfg.with_hints(s0, None)
    near = complex(integrate_complex(head, 0.0, 1.0, head_cfg).value)

    def far_integrand(y: float) -> complex:
        return complex(np.exp(-theta * y) * np.real(model.levy_density(y)))

    far_cfg = cfg.with_hints(None, None)
    decay = _decay_for(model, theta)
    if decay is not None:
        re = integrate_semi_infinite(lambda y: far_integrand(y).real, 1.0, decay, far_cfg).value.real
        im = integrate_semi_infinite(lambda y: far_integrand(y).imag, 1.0, decay, far_cfg).value.real
    else:
        re = integrate_to_infinity(lambda y: far_integrand(y).real, 1.0, far_cfg).value.real
        im = integrate_to_infinity(lambda y: far_integrand(y).imag, 1.0, far_cfg).value.real
    return near + complex(re, im) - model.tail(1.0)


def from_levy_density(name: str, levy_density: Callable[[Any], Any], small_jump_index: float,
                      tail_decay_rate: Optional[float] = None,
                      stable_part: Optional[Tuple[float, float]] = None,
                      remainder_exponent: Optional[float] = None,
                      growth_rate: float = 0.0,
                      levy_density_derivative: Optional[Callable[[int, float], float]] = None,
                      levy_density_analytic: bool = False,
                      cfg: Optional[QuadratureConfig] = None) -> SubordinatorModel:
    """
    只由 Lévy 密度构造模型：尾积分与累积量由数值积分给出，κ 的导数走 kappa_derivative_numeric

    Args:
        name: 模型名称
        levy_density: u(x)
        small_jump_index: 原点附近 u(x) ~ x^{−1−α₀} 中的 α₀，取值 [0, 1)
        tail_decay_rate: u 在无穷远处的指数衰减率，幂律尾部为 None
        stable_part: (a, α)，给出后才能走通用解析延拓
    """
    if not 0.0 <= small_jump_index < 1.0:
        raise DomainError(f"small_jump_index 必须位于 [0, 1)，收到 {small_jump_index}")
    if stable_part is not None and not (stable_part[0] > 0 and 0 < stable_part[1] < 1):
        raise DomainError(f"stable_part 需要 a > 0 且 0 < α < 1，收到 {stable_part}")
    quad_cfg = cfg or QuadratureConfig()
    holder: Dict[str, SubordinatorModel] = {}

    def tail(x: float) -> float:
        return tail_numeric(holder["model"], x)

    def cumulant(theta: Any) -> Any:
        return _vectorized(lambda th: cumulant_numeric(holder["model"], th), theta)

    model = SubordinatorModel(
        name=name,
        levy_density=levy_density,
        tail=tail,
        cumulant=cumulant,
        small_jump_index=small_jump_index,
        stable_part=stable_part,
        remainder_exponent=remainder_exponent,
        growth_rate=growth_rate,
        tail_decay_rate=tail_decay_rate,
        levy_density_derivative=levy_density_derivative,
        levy_density_analytic=levy_density_analytic,
        quadrature=quad_cfg,
    )
    holder["model"] = model
    logger.info(f"用户模型 {name} 已构造 (α₀ = {small_jump_index}, 尾部衰减 {tail_decay_rate})")
    return model


class ConsistencyReport(BaseModel):
    """模型自洽性检查结果"""

    model: str
    nonnegative: bool = Field(..., description="u ≥ 0")
    tail_nonincreasing: bool = Field(..., description="U⁺ 单调不增")
    tail_vanishes: bool = Field(..., description="U⁺(x) → 0")
    levy_integral: float = Field(..., description="∫(1∧x)u(x)dx")
    cumulant_at_zero: float = Field(..., description="|κ(0)|")
    cumulant_nonpositive: bool = Field(..., description="Re κ(θ) ≤ 0")
    max_derivative_deviation: float = Field(..., description="max |−U⁺′ − u| / u")
    messages: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.nonnegative and self.tail_nonincreasing and self.tail_vanishes
                and math.isfinite(self.levy_integral) and self.cumulant_at_zero < 1e-14
                and self.cumulant_nonpositive and self.max_derivative_deviation < 1e-6)


def check_model_consistency(model: SubordinatorModel, grid: Optional[Sequence[float]] = None,
                            thetas: Sequence[complex] = (0.5, 1.0, 2.0, 1 + 3j)) -> ConsistencyReport:
    """
    检查模型的基本性质：u 非负、U⁺ 单调趋零、(1∧x)u 可积、κ(0) = 0、Re κ ≤ 0、−U⁺′ ≈ u
    """
    grid = list(grid) if grid is not None else list(np.geomspace(0.05, 20.0, 25))
    messages: List[str] = []
    u_values = [float(np.real(model.levy_density(x))) for x in grid]
    nonnegative = all(v >= 0 for v in u_values)
    if not nonnegative:
        messages.append("Lévy 密度出现负值")

    tails = [model.tail(x) for x in grid]
    nonincreasing = all(b <= a * (1 + 1e-12) for a, b in zip(tails, tails[1:]))
    far = model.tail(1e4 * max(grid))
    vanishes = far < 0.1 * tails[0] and far <= tails[-1]
    if not nonincreasing:
        messages.append("尾积分不是单调不增")

    s0 = -model.small_jump_index if model.small_jump_index > 0 else None
    cfg = model.quadrature.with_hints(s0, None)
    near = integrate_finite(lambda y: y * float(np.real(model.levy_density(y))), 0.0, 1.0, cfg).value.real
    levy_integral = near + model.tail(1.0)

    kappa_zero = abs(complex(model.cumulant(0.0)))
    nonpositive = all(complex(model.cumulant(th)).real <= 1e-14 for th in thetas)
    if not nonpositive:
        messages.append("Re κ(θ) 出现正值")

    worst = 0.0
    for x, u in zip(grid, u_values):
        h = 1e-4 * x
        slope = -(model.tail(x + h) - model.tail(x - h)) / (2 * h)
        if u > 0:
            worst = max(worst, abs(slope - u) / u)
    if worst >= 1e-6:
        messages.append(f"−U⁺′ 与 u 的最大相对偏差 {worst:.2e}")

    report = ConsistencyReport(
        model=model.label, nonnegative=nonnegative, tail_nonincreasing=nonincreasing, tail_vanishes=vanishes,
        levy_integral=levy_integral, cumulant_at_zero=kappa_zero, cumulant_nonpositive=nonpositive,
        max_derivative_deviation=worst, messages=messages,
    )
    for message in messages:
        logger.warning(f"{model.label}: {message}")
    return report
