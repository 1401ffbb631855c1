#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
方法 M3：累积量函数的解析延拓与倾斜围道积分

延拓：u = a·x^{−1−α} + v，
    κ(θ) = aΓ(−α)θ^α + λ(θ) − λ(0)，λ(θ) = ∫₀^∞ e^{−θx}v(x)dx
λ 的积分射线按 Im θ 的符号旋转到 e^{∓iψ} 方向（上半平面用 e^{−iψ}），从而 κ 延拓到
|arg θ| < π/2 + ψ。

围道积分：
    uₙ(x) = (1/2πi)∫_C κ(θ)ⁿ e^{θx}dθ
    p(x; t) = (1/2πi)∫_C e^{κ(θ)t + θx}dθ
    ∂ⁿ/∂tⁿ p(x; t) = (1/2πi)∫_C κ(θ)ⁿ e^{κ(θ)t + θx}dθ
C 为角点 c、方向 ±(π/2 + ψ) 的两条射线。
"""

import logging
import math
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ..config.settings import ContourSpec, QuadratureConfig
from ..errors import CapabilityError, ContourError, DomainError
from ..models.base import SubordinatorModel, complex_power
from ..numerics.quadrature import (
    IntegralResult,
    bromwich_integral,
    integrate_finite,
    integrate_fourier,
    integrate_to_infinity,
    ray_pair_integral,
)
from ..numerics.specfun import gamma

logger = logging.getLogger("subordinatorDensity.methods.contour")

# λ(0) 只依赖模型，按对象身份缓存
_LAMBDA_ZERO: Dict[int, Tuple[SubordinatorModel, float]] = {}


class ContinuedCumulant:
    """
    κ 在锥 |arg θ| < π/2 + ψ 上的延拓，可作用于标量或 numpy 数组

    generic 为 True 时按 aΓ(−α)θ^α + λ_∓(θ) − λ(0) 构造，否则包装模型登记的闭式延拓。
    λ(0) 在首次用到时才计算（通用构造或 remainder）。
    """

    def __init__(self, model: SubordinatorModel, psi: float, generic: bool):
        self.model = model
        self.psi = float(psi)
        self.generic = generic
        self.stable_coefficient: Optional[float] = None
        self.alpha: Optional[float] = None
        if model.stable_part is not None:
            a, alpha = model.stable_part
            self.stable_coefficient = a
            self.alpha = alpha
        elif generic:
            raise CapabilityError(f"模型 {model.label} 没有稳定主部，无法构造通用延拓")

    @cached_property
    def offset(self) -> Optional[float]:
        """λ(0)，没有稳定主部时为 None"""
        if self.stable_coefficient is None:
            return None
        hit = _LAMBDA_ZERO.get(id(self.model))
        if hit is None or hit[0] is not self.model:
            hit = (self.model, self._lambda_zero())
            _LAMBDA_ZERO[id(self.model)] = hit
        return hit[1]

    @property
    def leading_coefficient(self) -> float:
        """aΓ(−α)"""
        return self.stable_coefficient * gamma(-self.alpha)

    def remainder_density(self, z: Any) -> Any:
        """v(z) = u(z) − a z^{−1−α}"""
        return self.model.levy_density(z) - self.stable_coefficient * complex_power(z, -1.0 - self.alpha)

    def _lambda_zero(self) -> float:
        """λ(0) = ∫₀^∞ v，原点附近 v ~ x^β"""
        if self.model.remainder_exponent is not None and math.isinf(self.model.remainder_exponent):
            return 0.0
        beta = self.model.remainder_exponent
        cfg = self.model.quadrature.with_hints(beta if beta is not None and beta < 0 else None, None)

        def v(x: float) -> float:
            return float(np.real(self.remainder_density(complex(x))))

        head = integrate_finite(v, 0.0, 1.0, cfg).value.real
        tail = integrate_to_infinity(v, 1.0, cfg.with_hints(None, None)).value.real
        return head + tail

    def rotated_transform(self, theta: complex) -> complex:
        """λ(θ)，积分射线方向 e^{−iψ}（Im θ > 0）、e^{+iψ}（Im θ < 0）或实轴"""
        if self.model.remainder_exponent is not None and math.isinf(self.model.remainder_exponent):
            return 0j
        theta = complex(theta)
        if theta.imag > 0:
            direction = complex(math.cos(self.psi), -math.sin(self.psi))
        elif theta.imag < 0:
            direction = complex(math.cos(self.psi), math.sin(self.psi))
        else:
            direction = 1.0 + 0j
        w = theta * direction
        if w.real <= 0:
            raise ContourError(f"θ = {theta} 超出延拓锥 |arg θ| < π/2 + ψ")
        beta = self.model.remainder_exponent

        def g(rho: float) -> complex:
            return complex(self.remainder_density(rho * direction)) * direction

        # 先积到一个振荡周期内，再用 Fourier 权积分剩余部分
        split = min(1.0, math.pi / abs(w.imag)) if w.imag != 0 else 1.0
        cfg = self.model.quadrature.with_hints(beta if beta is not None and beta < 0 else None, None)
        re = integrate_finite(lambda r: (np.exp(-w * r) * g(r)).real, 0.0, split, cfg).value.real
        im = integrate_finite(lambda r: (np.exp(-w * r) * g(r)).imag, 0.0, split, cfg).value.real
        far = integrate_fourier(lambda r: math.exp(-w.real * r) * g(r), split, w.imag,
                                cfg.with_hints(None, None)).value
        return complex(re, im) + complex(far)

    def _generic_scalar(self, theta: complex) -> complex:
        lead = self.leading_coefficient * complex(complex_power(theta, self.alpha))
        return lead + self.rotated_transform(theta) - self.offset

    def __call__(self, theta: Any) -> Any:
        if not self.generic:
            return self.model.continuation(theta)
        arr = np.asarray(theta, dtype=complex)
        if arr.ndim == 0:
            return self._generic_scalar(complex(arr))
        return np.vectorize(self._generic_scalar, otypes=[complex])(arr)

    def remainder(self, theta: Any) -> Any:
        """κ(θ) − aΓ(−α)θ^α + λ(0)，即 λ(θ)"""
        if self.stable_coefficient is None:
            raise CapabilityError(f"模型 {self.model.label} 没有稳定主部")
        return self(theta) - self.leading_coefficient * np.asarray(complex_power(theta, self.alpha)) + self.offset


def continue_cumulant(model: SubordinatorModel, psi: float = 0.6, generic: Optional[bool] = None) -> ContinuedCumulant:
    """
    构造 κ 的解析延拓

    Args:
        generic: None 时有闭式延拓就用闭式；True 强制走通用构造

    Raises:
        CapabilityError: 既没有闭式延拓，也不满足通用构造的条件（稳定主部、复解析的 Lévy 密度）
    """
    if not 0 < psi < math.pi / 2:
        raise DomainError(f"半角 ψ 必须位于 (0, π/2)，收到 {psi}")
    if generic is None:
        generic = model.continuation is None
    if generic and (model.stable_part is None or not model.levy_density_analytic):
        raise CapabilityError(f"模型 {model.label} 没有登记解析延拓，且缺少稳定主部或复解析的 Lévy 密度")
    cont = ContinuedCumulant(model, psi, generic)
    logger.debug(f"{model.label}: 延拓方式 {'通用构造' if generic else '闭式'}")
    return cont


def cumulant_on_contour(model: SubordinatorModel, spec: ContourSpec) -> ContinuedCumulant:
    """按围道参数选择延拓；角点必须在增长率右侧"""
    if spec.c <= model.growth_rate:
        raise ContourError(f"角点 c = {spec.c} 必须大于增长率 {model.growth_rate}")
    return continue_cumulant(model, spec.psi)


class DecayProfile(BaseModel):
    """两条射线上 |λ(θ)| 随半径的变化"""

    radii: List[float]
    upper: List[float]
    lower: List[float]

    @property
    def decreasing(self) -> bool:
        return all(b <= a for seq in (self.upper, self.lower) for a, b in zip(seq, seq[1:]))


def continuation_decay_profile(cont: ContinuedCumulant, spec: ContourSpec, radii: Sequence[float]) -> DecayProfile:
    """|κ(θ) − aΓ(−α)θ^α + λ(0)| 在 θ = c + r e^{±i(π/2+ψ)} 处的取值"""
    r = np.asarray(list(radii), dtype=float)
    up = complex(math.cos(spec.ray_angle), math.sin(spec.ray_angle))
    upper = np.abs(np.asarray(cont.remainder(spec.c + r * up)))
    lower = np.abs(np.asarray(cont.remainder(spec.c + r * up.conjugate())))
    return DecayProfile(radii=r.tolist(), upper=upper.tolist(), lower=lower.tolist())


def _contour(model: SubordinatorModel, spec: ContourSpec, x: float, F: Callable[[np.ndarray], np.ndarray],
             cfg: Optional[QuadratureConfig], what: str) -> IntegralResult:
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    result = ray_pair_integral(F, spec, x, cfg or model.quadrature)
    if result.imag_residual > 10.0 * max(result.error_estimate, model.quadrature.abs_tol):
        logger.warning(f"{model.label} {what}: 虚部残差 {result.imag_residual:.2e} 超过误差估计的 10 倍")
    logger.debug(f"{model.label} {what} = {result.value.real:.12g} ± {result.error_estimate:.2e}")
    return result


def u_n_contour_result(model: SubordinatorModel, spec: ContourSpec, n: int, x: float,
                       cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    kappa = cumulant_on_contour(model, spec)
    return _contour(model, spec, x, lambda th: np.asarray(kappa(th)) ** n, cfg, f"u_{n}({x:g}) 围道")


def u_n_contour(model: SubordinatorModel, spec: ContourSpec, n: int, x: float,
                cfg: Optional[QuadratureConfig] = None) -> float:
    """uₙ(x) = (1/2πi)∫_C κ(θ)ⁿ e^{θx}dθ"""
    return float(u_n_contour_result(model, spec, n, x, cfg).value.real)


def p_t_derivative_contour_result(model: SubordinatorModel, spec: ContourSpec, x: float, t: float, n: int,
                                  cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """∂ⁿ/∂tⁿ p(x; t)；n = 0 即密度本身，t = 0 时密度为 0"""
    if n < 0:
        raise DomainError(f"导数阶数必须非负，收到 n = {n}")
    if n == 0 and t == 0:
        return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
    kappa = cumulant_on_contour(model, spec)

    def integrand(theta: np.ndarray) -> np.ndarray:
        k = np.asarray(kappa(theta))
        return k ** n * np.exp(t * k)

    return _contour(model, spec, x, integrand, cfg, f"∂^{n}p({x:g}; {t:g}) 围道")


def p_t_derivative_contour(model: SubordinatorModel, spec: ContourSpec, x: float, t: float, n: int,
                           cfg: Optional[QuadratureConfig] = None) -> float:
    return float(p_t_derivative_contour_result(model, spec, x, t, n, cfg).value.real)


def p_contour_result(model: SubordinatorModel, spec: ContourSpec, x: float, t: float,
                     cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    return p_t_derivative_contour_result(model, spec, x, t, 0, cfg)


def p_contour(model: SubordinatorModel, spec: ContourSpec, x: float, t: float,
              cfg: Optional[QuadratureConfig] = None) -> float:
    """p(x; t) = (1/2πi)∫_C e^{κ(θ)t + θx}dθ；t 可取任意实数，t = 0 时为 0"""
    return float(p_contour_result(model, spec, x, t, cfg).value.real)


def p_bromwich_result(model: SubordinatorModel, x: float, t: float, c: Optional[float] = None,
                      cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """
    竖线反演 p(x; t) = (1/2πi)∫_{c−i∞}^{c+i∞} e^{κ(θ)t + θx}dθ，只用到 Re θ > 增长率上的 κ

    Raises:
        SlowDecayError: e^{κt} 衰减过慢（例如 Gamma 模型的小 t）且加速也未收敛
    """
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    if t < 0:
        raise DomainError(f"竖线反演要求 t ≥ 0，收到 t = {t}")
    if t == 0:
        return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
    c = c if c is not None else model.growth_rate + 1.0
    if c <= model.growth_rate:
        raise DomainError(f"竖线横坐标 c = {c} 必须大于增长率 {model.growth_rate}")
    result = bromwich_integral(lambda th: np.exp(t * np.asarray(model.cumulant(th))), c, x, cfg or model.quadrature)
    logger.debug(f"{model.label} p({x:g}; {t:g}) 竖线反演 = {result.value.real:.12g} ± {result.error_estimate:.2e}")
    return result


def p_bromwich(model: SubordinatorModel, x: float, t: float, c: Optional[float] = None,
               cfg: Optional[QuadratureConfig] = None) -> float:
    return float(p_bromwich_result(model, x, t, c, cfg).value.real)
