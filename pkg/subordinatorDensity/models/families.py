#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
内置模型族：正 α-稳定、Gamma、逆高斯 (IG)
每个族提供闭式的 u、U⁺、κ、κ^{(k)}、解析延拓与参照解；非单位参数由尺度关系给出：
    Gamma: p_{ν,b}(x; t) = b·p₁(bx; νt)
    IG:    p_{δ,γ}(x; t) = γ²·p₁(γ²x; δγt)
"""

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ConfigError, DomainError
from ..numerics.specfun import (
    exp_integral_e1,
    erfc,
    falling_factorial,
    hermite,
    recip_gamma,
    recip_gamma_taylor_coeffs,
)
from .base import SubordinatorModel, complex_power

logger = logging.getLogger("subordinatorDensity.models.families")

_SQRT_2PI = math.sqrt(2.0 * math.pi)
# 1/Γ(1+z) 的 Taylor 系数只预存到 20 阶，Gamma 的 uₙ 参照解因此最多到 21 阶
_GAMMA_ORACLE_MAX_ORDER = 21


class StableParams(BaseModel):
    """正 α-稳定从属子，κ(θ) = −θ^α"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(..., gt=0.0, lt=1.0, description="稳定指数 α ∈ (0, 1)")


class GammaParams(BaseModel):
    """Gamma 从属子，u(x) = ν x^{−1} e^{−bx}"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    shape: float = Field(1.0, gt=0.0, description="形状 ν")
    rate: float = Field(1.0, gt=0.0, description="速率 b")


class IGParams(BaseModel):
    """逆高斯从属子，u(x) = δ (2π)^{−1/2} x^{−3/2} e^{−γ²x/2}"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta: float = Field(1.0, gt=0.0, description="δ")
    gamma: float = Field(1.0, gt=0.0, description="γ")


def _real_or_complex(z: Any) -> Tuple[Any, bool]:
    arr = np.asarray(z)
    return arr, np.iscomplexobj(arr)


def _finish(out: Any) -> Any:
    out = np.asarray(out)
    if out.ndim == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


# ---------------------------------------------------------------------------
# α-稳定
# ---------------------------------------------------------------------------

def _sinpi(z: float) -> float:
    k = round(z)
    value = math.sin(math.pi * (z - k))
    return -value if k % 2 else value


def stable_series_density(x: float, t: float, alpha: float, tol: float = 1e-10,
                          n_max: int = 400) -> Tuple[float, float]:
    """
    α-稳定密度的级数 p(x; t) = Σ_{n≥1} (−1)ⁿ x^{−1−nα} tⁿ / (n!·Γ(−nα))

    Returns:
        (部分和, 误差界)，误差界取第一个略去项与消去误差中的较大者
    """
    if x <= 0:
        raise DomainError(f"密度要求 x > 0，收到 x = {x}")
    if t == 0:
        return 0.0, 0.0
    if t < 0:
        raise DomainError(f"时间必须非负，收到 t = {t}")
    log_t = math.log(t)
    log_x = math.log(x)
    terms: List[float] = []
    largest = 0.0
    small_run = 0
    bound = math.inf
    for n in range(1, n_max + 1):
        z = n * alpha
        # 1/Γ(−z) = −sin(πz)Γ(1+z)/π
        log_mag = n * log_t - (1.0 + z) * log_x + math.lgamma(1.0 + z) - math.lgamma(n + 1.0)
        sign = (-1.0) ** n * -_sinpi(z) / math.pi
        term = sign * math.exp(log_mag) if log_mag > -745.0 else 0.0
        terms.append(term)
        largest = max(largest, abs(term))
        total = math.fsum(terms)
        envelope = math.exp(log_mag) / math.pi if log_mag > -745.0 else 0.0
        if envelope < tol * max(abs(total), 1e-300) or envelope < 1e-300:
            small_run += 1
            if small_run >= 2:
                bound = envelope
                break
        else:
            small_run = 0
    total = math.fsum(terms)
    return total, max(bound, 1e-16 * largest)


def make_stable(params: StableParams) -> SubordinatorModel:
    """
    正 α-稳定模型：u(x) = −x^{−1−α}/Γ(−α)，U⁺(x) = x^{−α}/Γ(1−α)，κ(θ) = −θ^α
    """
    alpha = params.alpha
    a = -recip_gamma(-alpha)
    tail_coeff = recip_gamma(1.0 - alpha)

    def levy_density(z: Any) -> Any:
        arr, is_complex = _real_or_complex(z)
        if is_complex:
            return _finish(a * complex_power(arr, -1.0 - alpha))
        return _finish(a * np.power(arr.astype(float), -1.0 - alpha))

    def tail(x: float) -> float:
        return tail_coeff * x ** (-alpha)

    def cumulant(theta: Any) -> Any:
        return _finish(-np.asarray(complex_power(theta, alpha)))

    def cumulant_derivative(k: int, theta: Any) -> Any:
        return _finish(-falling_factorial(alpha, k) * np.asarray(complex_power(theta, alpha - k)))

    def levy_density_derivative(k: int, x: float) -> float:
        return a * falling_factorial(-1.0 - alpha, k) * x ** (-1.0 - alpha - k)

    def oracle_u_n(n: int, x: float) -> float:
        return (-1.0) ** n * x ** (-1.0 - n * alpha) * recip_gamma(-n * alpha)

    def oracle_p(x: float, t: float) -> float:
        value, bound = stable_series_density(x, t, alpha)
        if bound > 1e-10 * max(abs(value), 1e-300):
            logger.warning(f"α-稳定级数在 x = {x}, t = {t} 处精度不足 (误差界 {bound:.2e})，返回 NaN")
            return math.nan
        return value

    return SubordinatorModel(
        name="stable",
        levy_density=levy_density,
        tail=tail,
        cumulant=cumulant,
        small_jump_index=alpha,
        cumulant_derivative=cumulant_derivative,
        continuation=cumulant,
        stable_part=(a, alpha),
        remainder_exponent=math.inf,
        growth_rate=0.0,
        tail_decay_rate=None,
        levy_density_derivative=levy_density_derivative,
        levy_density_analytic=True,
        oracle_u_n=oracle_u_n,
        oracle_p=oracle_p,
        params={"alpha": alpha},
    )


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def gamma_unit_u_n(n: int, y: float) -> float:
    """单位 Gamma 模型的 uₙ(y) = y^{−1}e^{−y} Σ_{k<n} n!/(n−1−k)! c_k ln^{n−1−k} y"""
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    if n > _GAMMA_ORACLE_MAX_ORDER:
        raise DomainError(f"Gamma 参照系数只支持 n ≤ {_GAMMA_ORACLE_MAX_ORDER}")
    if y <= 0:
        raise DomainError(f"要求 y > 0，收到 {y}")
    c = recip_gamma_taylor_coeffs(max(n - 1, 1))
    ln_y = math.log(y)
    total = math.fsum(
        math.factorial(n) / math.factorial(n - 1 - k) * c[k] * ln_y ** (n - 1 - k) for k in range(n)
    )
    return math.exp(-y) / y * total


def make_gamma(params: Optional[GammaParams] = None) -> SubordinatorModel:
    """
    Gamma 模型：u(x) = ν x^{−1}e^{−bx}，U⁺(x) = ν E₁(bx)，κ(θ) = −ν ln(1 + θ/b)
    """
    params = params or GammaParams()
    nu, b = params.shape, params.rate

    def levy_density(z: Any) -> Any:
        arr, is_complex = _real_or_complex(z)
        arr = arr.astype(complex if is_complex else float)
        return _finish(nu * np.exp(-b * arr) / arr)

    def tail(x: float) -> float:
        return nu * exp_integral_e1(b * x)

    def cumulant(theta: Any) -> Any:
        z = np.asarray(theta, dtype=complex)
        return _finish(-nu * np.log1p(z / b))

    def cumulant_derivative(k: int, theta: Any) -> Any:
        z = np.asarray(theta, dtype=complex)
        return _finish(nu * (-1.0) ** k * math.factorial(k - 1) / (b + z) ** k)

    def levy_density_derivative(k: int, x: float) -> float:
        total = 0.0
        for j in range(k + 1):
            total += math.comb(k, j) * (-1.0) ** j * math.factorial(j) * x ** (-1.0 - j) * (-b) ** (k - j)
        return nu * total * math.exp(-b * x)

    def oracle_u_n(n: int, x: float) -> float:
        return nu ** n * b * gamma_unit_u_n(n, b * x)

    def oracle_p(x: float, t: float) -> float:
        if t == 0:
            return 0.0
        s = nu * t
        y = b * x
        return b * math.exp((s - 1.0) * math.log(y) - y) * recip_gamma(s)

    return SubordinatorModel(
        name="gamma",
        levy_density=levy_density,
        tail=tail,
        cumulant=cumulant,
        small_jump_index=0.0,
        cumulant_derivative=cumulant_derivative,
        continuation=cumulant,
        stable_part=None,
        remainder_exponent=None,
        growth_rate=0.0,
        tail_decay_rate=b,
        levy_density_derivative=levy_density_derivative,
        levy_density_analytic=True,
        oracle_u_n=oracle_u_n,
        oracle_p=oracle_p,
        oracle_max_order=_GAMMA_ORACLE_MAX_ORDER,
        density_exponent=lambda t: nu * t - 1.0,
        params={"shape": nu, "rate": b},
    )


# ---------------------------------------------------------------------------
# 逆高斯
# ---------------------------------------------------------------------------

def ig_unit_tail(y: float) -> float:
    """U₁⁺(y) = √(2/(πy)) e^{−y/2} − erfc(√(y/2))"""
    return math.sqrt(2.0 / (math.pi * y)) * math.exp(-0.5 * y) - erfc(math.sqrt(0.5 * y))


def ig_unit_u_n(n: int, y: float) -> float:
    """uₙ(y) = (n/√π) 2^{−n/2} y^{−1−n/2} e^{−y/2} H_{n−1}(√(y/2))"""
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    return (n / math.sqrt(math.pi) * 2.0 ** (-0.5 * n) * y ** (-1.0 - 0.5 * n) * math.exp(-0.5 * y)
            * hermite(n - 1, math.sqrt(0.5 * y)))


def ig_unit_density(y: float, s: float) -> float:
    """p₁(y; s) = s y^{−3/2} e^{−(y−s)²/(2y)} / √(2π)"""
    if s == 0:
        return 0.0
    return s * y ** -1.5 * math.exp(-((y - s) ** 2) / (2.0 * y)) / _SQRT_2PI


def make_ig(params: Optional[IGParams] = None) -> SubordinatorModel:
    """
    逆高斯模型：κ(θ) = δ(γ − √(γ² + 2θ))，U⁺ 由 erfc 闭式给出
    """
    params = params or IGParams()
    delta, g = params.delta, params.gamma
    a = delta / _SQRT_2PI
    beta = 0.5 * g * g

    def levy_density(z: Any) -> Any:
        arr, is_complex = _real_or_complex(z)
        if is_complex:
            return _finish(a * complex_power(arr, -1.5) * np.exp(-beta * arr))
        arr = arr.astype(float)
        return _finish(a * np.power(arr, -1.5) * np.exp(-beta * arr))

    def tail(x: float) -> float:
        return delta * g * ig_unit_tail(g * g * x)

    def cumulant(theta: Any) -> Any:
        z = np.asarray(theta, dtype=complex)
        return _finish(delta * (g - np.sqrt(g * g + 2.0 * z)))

    def cumulant_derivative(k: int, theta: Any) -> Any:
        z = np.asarray(theta, dtype=complex)
        unit = -(2.0 ** k) * falling_factorial(0.5, k) * complex_power(1.0 + 2.0 * z / (g * g), 0.5 - k)
        return _finish(delta * g * g ** (-2.0 * k) * np.asarray(unit))

    def levy_density_derivative(k: int, x: float) -> float:
        total = 0.0
        for j in range(k + 1):
            total += math.comb(k, j) * falling_factorial(-1.5, j) * x ** (-1.5 - j) * (-beta) ** (k - j)
        return a * total * math.exp(-beta * x)

    def oracle_u_n(n: int, x: float) -> float:
        return g * g * (delta * g) ** n * ig_unit_u_n(n, g * g * x)

    def oracle_p(x: float, t: float) -> float:
        return g * g * ig_unit_density(g * g * x, delta * g * t)

    return SubordinatorModel(
        name="ig",
        levy_density=levy_density,
        tail=tail,
        cumulant=cumulant,
        small_jump_index=0.5,
        cumulant_derivative=cumulant_derivative,
        continuation=cumulant,
        stable_part=(a, 0.5),
        remainder_exponent=-0.5,
        growth_rate=0.0,
        tail_decay_rate=beta,
        levy_density_derivative=levy_density_derivative,
        levy_density_analytic=True,
        oracle_u_n=oracle_u_n,
        oracle_p=oracle_p,
        params={"delta": delta, "gamma": g},
    )


def ig_tail_conv_cube(x: float) -> float:
    """单位 IG 的 (U⁺)^{∗3}(x) = 2√(2x/π)e^{−x/2}(2+x) − (2x²+6x)erfc(√(x/2))"""
    return (2.0 * math.sqrt(2.0 * x / math.pi) * math.exp(-0.5 * x) * (2.0 + x)
            - (2.0 * x * x + 6.0 * x) * erfc(math.sqrt(0.5 * x)))


def stable_tail_conv_power(n: int, x: float, alpha: float) -> float:
    """α-稳定的 (U⁺)^{∗n}(x) = x^{n(1−α)−1}/Γ(n(1−α))"""
    order = n * (1.0 - alpha)
    return x ** (order - 1.0) * recip_gamma(order)


# ---------------------------------------------------------------------------
# 注册表与模型描述解析
# ---------------------------------------------------------------------------

MODEL_REGISTRY: Dict[str, Tuple[Type[BaseModel], Callable[..., SubordinatorModel]]] = {
    "stable": (StableParams, make_stable),
    "gamma": (GammaParams, make_gamma),
    "ig": (IGParams, make_ig),
}


def list_models() -> List[Dict[str, Any]]:
    """已注册模型及其参数说明"""
    out = []
    for name, (params_cls, _) in MODEL_REGISTRY.items():
        fields = {
            key: {"default": None if info.is_required() else info.default, "description": info.description}
            for key, info in params_cls.model_fields.items()
        }
        out.append({"name": name, "description": (params_cls.__doc__ or "").strip(), "params": fields})
    return out


def parse_model_spec(spec: str) -> SubordinatorModel:
    """
    解析 `name[:key=value,…]` 形式的模型描述，例如 "stable:alpha=0.5"、"gamma"、"ig:delta=2"

    Raises:
        ConfigError: 未知模型、未知参数或取值无效
    """
    text = (spec or "").strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name not in MODEL_REGISTRY:
        raise ConfigError(f"未知模型 '{name}'，可用模型: {', '.join(sorted(MODEL_REGISTRY))}")
    params_cls, factory = MODEL_REGISTRY[name]

    values: Dict[str, float] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"模型参数 '{item}' 缺少 '='")
        if key not in params_cls.model_fields:
            raise ConfigError(f"模型 {name} 没有参数 '{key}'，可用参数: {', '.join(params_cls.model_fields)}")
        try:
            values[key] = float(raw)
        except ValueError as e:
            raise ConfigError(f"模型参数 {key} 的值 '{raw}' 不是数字") from e

    try:
        params = params_cls(**values)
    except ValidationError as e:
        raise ConfigError(f"模型 {name} 的参数无效: {e}") from e
    model = factory(params)
    logger.debug(f"已解析模型描述 '{spec}' -> {model.label}")
    return model
