#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
方法 M1：复合泊松近似
用可积的 u_ε 近似 Lévy 密度，c(ε) = ∫u_ε，
    u_{nε}(x) = Σ_{k=1}^n (−1)^{n−k} C(n,k) c(ε)^{n−k} u_ε^{∗k}(x)
再沿 ε 阶梯外推到 ε → 0。交替和的抵消程度以条件数 Σ|项|/|和| 报告。
"""

import logging
import math
from collections import OrderedDict
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union, get_args

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import brentq

from ..config.settings import EpsilonScheme, GridConfig, QuadratureConfig, SchemeKind
from ..errors import CapabilityError, DomainError, InfeasibleSchemeError, SeriesNotConverged
from ..models.base import SubordinatorModel
from ..numerics.grids import ConvolutionPowers
from ..numerics.quadrature import IntegralResult, integrate_finite, integrate_semi_infinite, integrate_to_infinity

logger = logging.getLogger("subordinatorDensity.methods.cp_approx")

SchemeLike = Union[EpsilonScheme, str]

# 交替和丢掉一半以上的有效位时告警
CANCELLATION_WARNING = 1e8
_CACHE_SIZE = 32


class EpsilonCoefficient(BaseModel):
    """一次交替和 u_{nε}(x) 的结果"""

    eps: float
    n: int
    x: float
    value: float
    error_estimate: float = Field(..., ge=0.0)
    condition_number: float = Field(..., ge=0.0, description="Σ|项| / |和|")
    terms: List[float]
    cancellation_warning: bool


class ExtrapolationResult(BaseModel):
    """ε → 0 外推结果；flagged 表示序列不规则，value 退回为最后一个原始样本"""

    value: float
    error_estimate: float = Field(..., ge=0.0)
    exponent: Optional[float] = Field(None, description="已知或首阶拟合得到的展开指数")
    flagged: bool = False


class LadderSample(BaseModel):
    eps: float
    value: float
    error_estimate: float
    condition_number: float


class LadderResult(BaseModel):
    """u_n_extrapolated 的完整记录：阶梯上每个样本与外推结果"""

    model: str
    scheme: str
    n: int
    x: float
    samples: List[LadderSample]
    extrapolation: ExtrapolationResult

    @property
    def value(self) -> float:
        return self.extrapolation.value

    @property
    def error_estimate(self) -> float:
        return self.extrapolation.error_estimate

    @property
    def condition_numbers(self) -> List[float]:
        return [s.condition_number for s in self.samples]


def _kind(scheme: SchemeLike) -> SchemeKind:
    kind = scheme.kind if isinstance(scheme, EpsilonScheme) else str(scheme)
    if kind not in get_args(SchemeKind):
        raise DomainError(f"未知的 u_ε 方案 '{kind}'")
    return kind  # type: ignore[return-value]


def _u(model: SubordinatorModel, x: float) -> float:
    return float(np.real(model.levy_density(x)))


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"ε 必须为正，收到 {eps}")


def u_eps(model: SubordinatorModel, scheme: SchemeLike, eps: float, x: float) -> float:
    """
    近似 Lévy 密度 u_ε(x)

    truncate: 1[x ≥ ε]·u；exp_tilt: e^{−εx}·u；smooth_cut: e^{−ε/x}·u；
    power_tilt: x^ε·u；square_cut: e^{−ε²/(2x)}·u；semigroup: p(x; ε)/ε
    """
    _check_eps(eps)
    if x <= 0:
        return 0.0
    kind = _kind(scheme)
    if kind == "truncate":
        return _u(model, x) if x >= eps else 0.0
    if kind == "exp_tilt":
        return math.exp(-eps * x) * _u(model, x)
    if kind == "smooth_cut":
        return math.exp(-eps / x) * _u(model, x)
    if kind == "power_tilt":
        return x ** eps * _u(model, x)
    if kind == "square_cut":
        return math.exp(-eps * eps / (2.0 * x)) * _u(model, x)
    if model.oracle_p is None:
        raise CapabilityError(f"模型 {model.label} 没有闭式密度，无法使用 semigroup 方案")
    return model.oracle_p(x, eps) / eps


class EpsilonApproximation:
    """
    固定 (模型, 方案, ε) 的复合泊松近似：核 u_ε、总质量 c(ε)、卷积幂与 u_{nε}

    semigroup 方案利用 p(·; ε)^{∗k} = p(·; kε) 直接给出卷积幂，不建网格。
    """

    def __init__(self, model: SubordinatorModel, kind: SchemeKind, eps: float,
                 grid: Optional[GridConfig] = None, x_max: float = 4.0):
        _check_eps(eps)
        if kind == "semigroup" and model.oracle_p is None:
            raise CapabilityError(f"模型 {model.label} 没有闭式密度，无法使用 semigroup 方案")
        self.model = model
        self.kind = kind
        self.eps = float(eps)
        self.grid = grid or GridConfig()
        self.quad: QuadratureConfig = model.quadrature
        self._x_max = x_max

    def kernel(self, x: float) -> float:
        return u_eps(self.model, self.kind, self.eps, x)

    @property
    def support_start(self) -> float:
        return self.eps if self.kind == "truncate" else 0.0

    @property
    def kernel_exponent(self) -> Optional[float]:
        """u_ε 在原点附近 x^s 中的 s；原点处消失的方案为 None"""
        if self.kind == "exp_tilt":
            return self.model.levy_exponent
        if self.kind == "power_tilt":
            return self.eps + self.model.levy_exponent
        if self.kind == "semigroup" and self.model.density_exponent is not None:
            return self.model.density_exponent(self.eps)
        return None

    @property
    def kernel_breaks(self) -> Tuple[float, ...]:
        if self.kind == "truncate":
            return (self.eps,)
        if self.kind == "smooth_cut":
            return (self.eps, 10.0 * self.eps)
        if self.kind == "square_cut":
            return (0.5 * self.eps ** 2, 5.0 * self.eps ** 2)
        return ()

    def _require_integrable(self) -> None:
        model = self.model
        if self.kind == "exp_tilt":
            raise InfeasibleSchemeError(
                f"exp_tilt 保留了原点奇异性 x^{model.levy_exponent:g}，{model.label} 的 c(ε) 为无穷")
        if self.kind == "power_tilt":
            if self.eps <= model.small_jump_index:
                raise InfeasibleSchemeError(
                    f"power_tilt 要求 ε > α₀ = {model.small_jump_index}，收到 ε = {self.eps}")
            if not model.tail_decay_rate:
                raise InfeasibleSchemeError(f"power_tilt 要求 Lévy 密度指数衰减，{model.label} 为幂律尾部")

    def _integrate_kernel(self, f: Callable[[float], float]) -> IntegralResult:
        """∫₀^∞ f，f 与 u_ε 有相同的原点行为与尾部"""
        s = self.kernel_exponent
        cut = max(1.0, 20.0 * max(self.kernel_breaks, default=self.eps))
        head = integrate_finite(f, self.support_start, cut, self.quad.with_hints(s if s is not None and s < 0 else None),
                                list(self.kernel_breaks))
        far_cfg = self.quad.with_hints(None, None)
        if self.model.tail_decay_rate:
            far = integrate_semi_infinite(f, cut, self.model.tail_decay_rate, far_cfg)
        else:
            far = integrate_to_infinity(f, cut, far_cfg)
        return IntegralResult(value=head.value.real + far.value.real,
                              error_estimate=head.error_estimate + far.error_estimate,
                              evaluations=head.evaluations + far.evaluations)

    @cached_property
    def mass(self) -> float:
        """c(ε) = ∫₀^∞ u_ε"""
        self._require_integrable()
        if self.kind == "truncate":
            value = self.model.tail(self.eps)
        elif self.kind == "semigroup":
            value = 1.0 / self.eps
        else:
            value = self._integrate_kernel(self.kernel).value.real
        logger.debug(f"{self.model.label} [{self.kind}] c({self.eps:g}) = {value:.15g}")
        return value

    @cached_property
    def powers(self) -> ConvolutionPowers:
        self._require_integrable()
        return ConvolutionPowers(
            self.kernel, self.quad, self.grid, x_max=self._x_max,
            kernel_exponent=self.kernel_exponent, support_start=self.support_start,
            kernel_breaks=self.kernel_breaks, name=f"{self.model.label}[{self.kind}, ε={self.eps:g}]",
        )

    def conv_power_result(self, k: int, x: float) -> IntegralResult:
        """u_ε^{∗k}(x)"""
        if k < 1:
            raise DomainError(f"卷积阶数必须 ≥ 1，收到 k = {k}")
        if self.kind == "semigroup":
            if x <= 0:
                return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
            value = self.model.oracle_p(x, k * self.eps) / self.eps ** k
            return IntegralResult(value=value, error_estimate=0.0, evaluations=1)
        return self.powers.power_result(k, x)

    def conv_power(self, k: int, x: float) -> float:
        return float(self.conv_power_result(k, x).value.real)

    def cumulative_power(self, k: int, x: float) -> IntegralResult:
        """∫₀ˣ u_ε^{∗k}"""
        if self.kind != "semigroup":
            return self.powers.cumulative_result(k, x)
        if x <= 0:
            return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
        s = self.model.density_exponent(k * self.eps) if self.model.density_exponent else None
        cfg = self.quad.with_hints(s if s is not None and s < 0 else None, None)
        part = integrate_finite(lambda y: self.model.oracle_p(y, k * self.eps), 0.0, x, cfg)
        scale = self.eps ** -k
        return IntegralResult(value=scale * part.value.real, error_estimate=scale * part.error_estimate,
                              evaluations=part.evaluations)

    def coefficient(self, n: int, x: float) -> EpsilonCoefficient:
        """交替二项和 u_{nε}(x)，用 math.fsum 求和并给出条件数"""
        if n < 1:
            raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
        if x <= 0:
            raise DomainError(f"要求 x > 0，收到 x = {x}")
        if n == 1:
            value = self.kernel(x)
            return EpsilonCoefficient(eps=self.eps, n=1, x=x, value=value, error_estimate=0.0,
                                      condition_number=1.0, terms=[value], cancellation_warning=False)
        c = self.mass
        terms: List[float] = []
        error = 0.0
        for k in range(1, n + 1):
            weight = (-1.0) ** (n - k) * math.comb(n, k) * c ** (n - k)
            part = self.conv_power_result(k, x)
            terms.append(weight * part.value.real)
            error += abs(weight) * part.error_estimate
        value = math.fsum(terms)
        magnitude = math.fsum(abs(v) for v in terms)
        if value != 0:
            condition = magnitude / abs(value)
        else:
            condition = 1.0 if magnitude == 0 else math.inf
        # 求和本身的舍入误差
        error += magnitude * np.finfo(float).eps
        return EpsilonCoefficient(eps=self.eps, n=n, x=x, value=value, error_estimate=error,
                                  condition_number=condition, terms=terms,
                                  cancellation_warning=condition > CANCELLATION_WARNING)


_approximations: "OrderedDict[tuple, EpsilonApproximation]" = OrderedDict()


def get_approximation(model: SubordinatorModel, scheme: SchemeLike, eps: float,
                      grid: Optional[GridConfig] = None) -> EpsilonApproximation:
    """按 (模型, 方案, ε, 网格配置) 复用近似对象，保留最近使用的若干个"""
    kind = _kind(scheme)
    grid = grid or GridConfig()
    key = (id(model), kind, float(eps), grid)
    cached = _approximations.get(key)
    if cached is not None and cached.model is model:
        _approximations.move_to_end(key)
        return cached
    approx = EpsilonApproximation(model, kind, eps, grid)
    _approximations[key] = approx
    while len(_approximations) > _CACHE_SIZE:
        _approximations.popitem(last=False)
    return approx


def clear_cache() -> None:
    _approximations.clear()


def c_epsilon(model: SubordinatorModel, scheme: SchemeLike, eps: float) -> float:
    """
    c(ε) = ∫₀^∞ u_ε(x)dx；truncate 方案直接取 U⁺(ε)

    Raises:
        InfeasibleSchemeError: u_ε 不可积（exp_tilt；ε ≤ α₀ 或幂律尾部下的 power_tilt）
    """
    return get_approximation(model, scheme, eps).mass


def u_eps_conv_power(model: SubordinatorModel, scheme: SchemeLike, eps: float, k: int, x: float,
                     grid: Optional[GridConfig] = None) -> float:
    """u_ε^{∗k}(x)；k = 1 时就是 u_ε(x)"""
    return get_approximation(model, scheme, eps, grid).conv_power(k, x)


def u_n_eps_detailed(model: SubordinatorModel, scheme: SchemeLike, eps: float, n: int, x: float,
                     grid: Optional[GridConfig] = None) -> EpsilonCoefficient:
    """u_{nε}(x) 及其条件数、各项与抵消告警"""
    result = get_approximation(model, scheme, eps, grid).coefficient(n, x)
    logger.info(f"{model.label} u_{{{n},ε={eps:g}}}({x:g}) = {result.value:.12g}, "
                f"条件数 {result.condition_number:.3e}")
    if result.cancellation_warning:
        logger.warning(f"{model.label} u_{{{n},ε={eps:g}}}({x:g}) 的交替和严重抵消，"
                       f"条件数 {result.condition_number:.3e}")
    return result


def u_n_eps(model: SubordinatorModel, scheme: SchemeLike, eps: float, n: int, x: float,
            grid: Optional[GridConfig] = None) -> float:
    return u_n_eps_detailed(model, scheme, eps, n, x, grid).value


def u_n_eps_recursive(model: SubordinatorModel, scheme: SchemeLike, eps: float, n: int, x: float,
                      grid: Optional[GridConfig] = None) -> float:
    """逐阶递推 u_{nε} = u_ε^{∗n} − Σ_{k<n} C(n,k) c^{n−k} u_{kε}"""
    if n < 1:
        raise DomainError(f"系数阶数必须 ≥ 1，收到 n = {n}")
    approx = get_approximation(model, scheme, eps, grid)
    lower: List[float] = []
    for m in range(1, n + 1):
        power = approx.conv_power(m, x)
        if m == 1:
            lower.append(power)
            continue
        c = approx.mass
        correction = math.fsum(math.comb(m, k) * c ** (m - k) * lower[k - 1] for k in range(1, m))
        lower.append(power - correction)
    return lower[-1]


def conv_power_from_coefficients(c: float, coefficients: Sequence[float]) -> float:
    """
    由 u_{1ε}, …, u_{nε} 重建 u_ε^{∗n} = Σ_{k=1}^n C(n,k) c^{n−k} u_{kε}

    Args:
        c: c(ε)
        coefficients: 依次为 u_{1ε}(x), …, u_{nε}(x)
    """
    n = len(coefficients)
    if n == 0:
        raise DomainError("至少需要一个系数")
    return math.fsum(math.comb(n, k) * c ** (n - k) * coefficients[k - 1] for k in range(1, n + 1))


def u_n_eps_recurrence(model: SubordinatorModel, scheme: SchemeLike, eps: float, n: int, x: float,
                       grid: Optional[GridConfig] = None) -> float:
    """
    由 u_{n−1,ε} 递推 u_{nε}：
        u_{nε}(x) = n x^{−1} {∫₀ˣ u_{n−1,ε}(x−y) ū_ε(y)dy + (−1)^{n−1} c^{n−1} ū_ε(x)}，ū_ε(y) = y u_ε(y)
    """
    if n < 2:
        raise DomainError(f"递推从 n = 2 开始，收到 n = {n}")
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    approx = get_approximation(model, scheme, eps, grid)
    c = approx.mass
    prev = n - 1

    def lower(z: float) -> float:
        if z <= 0:
            return 0.0
        return approx.kernel(z) if prev == 1 else approx.coefficient(prev, z).value

    def integrand(y: float) -> float:
        return lower(x - y) * y * approx.kernel(y)

    s = approx.kernel_exponent
    origin = s + 1.0 if s is not None and s + 1.0 < 0 else None
    end = s if s is not None and s < 0 else None
    breaks = [b for b in approx.kernel_breaks if b < x]
    breaks += [x - k * b for b in approx.kernel_breaks for k in range(1, prev + 1) if 0 < x - k * b < x]
    integral = integrate_finite(integrand, 0.0, x, approx.quad.with_hints(origin, end), sorted(set(breaks)))
    bar = x * approx.kernel(x)
    return n / x * (integral.value.real + (-1.0) ** prev * c ** prev * bar)


def u2_eps_stabilized(model: SubordinatorModel, scheme: SchemeLike, eps: float, x: float,
                      grid: Optional[GridConfig] = None) -> float:
    """
    无抵消形式的 u_{2ε}(x) = 2x^{−1}{∫₀ˣ u_ε(y)[ū_ε(x−y) − ū_ε(x)]dy − ū_ε(x)U_ε⁺(x)}，
    其中 U_ε⁺(x) = c(ε) − ∫₀ˣ u_ε
    """
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    approx = get_approximation(model, scheme, eps, grid)
    bar_x = x * approx.kernel(x)

    def integrand(y: float) -> float:
        z = x - y
        return approx.kernel(y) * (z * approx.kernel(z) - bar_x)

    s = approx.kernel_exponent
    origin = s + 1.0 if s is not None and s + 1.0 < 0 else None
    breaks = sorted({b for b in approx.kernel_breaks if b < x} | {x - b for b in approx.kernel_breaks if b < x})
    integral = integrate_finite(integrand, 0.0, x, approx.quad.with_hints(origin, origin), breaks)
    tail_eps = approx.mass - approx.cumulative_power(1, x).value.real
    return 2.0 / x * (integral.value.real - bar_x * tail_eps)


def u2_stabilized(model: SubordinatorModel, x: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """
    u₂(x) = 2x^{−1}{∫₀ˣ u(y)[ū(x−y) − ū(x)]dy − ū(x)U⁺(x)}，ū(y) = y u(y)

    不经过 ε 极限的 u₂；两端的奇异性都是 y^{−α₀} 型
    """
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    cfg = cfg or model.quadrature
    bar_x = x * _u(model, x)

    def integrand(y: float) -> float:
        z = x - y
        return _u(model, y) * (z * _u(model, z) - bar_x)

    hint = -model.small_jump_index if model.small_jump_index > 0 else None
    integral = integrate_finite(integrand, 0.0, x, cfg.with_hints(hint, hint))
    value = 2.0 / x * (integral.value.real - bar_x * model.tail(x))
    logger.debug(f"{model.label} u₂({x:g}) 稳定形式 = {value:.15g} ± {2.0 / x * integral.error_estimate:.2e}")
    return value


def dominated_feasibility(model: SubordinatorModel, scheme: SchemeLike, eps: float) -> float:
    """∫(1∧x)|u_ε(x) − u(x)|dx；沿 ε → 0 应趋于 0"""
    _check_eps(eps)
    kind = _kind(scheme)
    cfg = model.quadrature
    alpha0 = model.small_jump_index

    def gap(y: float) -> float:
        return abs(u_eps(model, kind, eps, y) - _u(model, y))

    if kind == "truncate":
        near = integrate_finite(lambda y: y * _u(model, y), 0.0, min(eps, 1.0),
                                cfg.with_hints(-alpha0 if alpha0 > 0 else None, None)).value.real
        return near + (model.tail(1.0) - model.tail(eps) if eps > 1.0 else 0.0)

    scale = eps * eps if kind == "square_cut" else eps
    breaks = [p for p in (scale, 10.0 * scale) if p < 1.0]
    near_cfg = cfg.with_hints(-alpha0 if alpha0 > 0 else None, None)
    near = integrate_finite(lambda y: y * gap(y), 0.0, 1.0, near_cfg, breaks).value.real
    far_cfg = cfg.with_hints(None, None)
    if model.tail_decay_rate:
        far = integrate_semi_infinite(gap, 1.0, model.tail_decay_rate, far_cfg).value.real
    else:
        far = integrate_to_infinity(gap, 1.0, far_cfg).value.real
    return near + far


# ---------------------------------------------------------------------------
# ε → 0 外推
# ---------------------------------------------------------------------------

def _erratic(values: Sequence[float]) -> bool:
    """相邻差分符号不一致视为不规则"""
    scale = max(abs(v) for v in values) or 1.0
    diffs = [b - a for a, b in zip(values, values[1:]) if abs(b - a) > 1e-14 * scale]
    return any(d1 * d2 < 0 for d1, d2 in zip(diffs, diffs[1:]))


def _richardson(eps: Sequence[float], values: Sequence[float], q: float) -> Tuple[float, float]:
    """h = ε^q 的多项式外推表，取最后一行中相邻两级之差最小的一列"""
    h = [e ** q for e in eps]
    table: List[List[float]] = []
    for i, v in enumerate(values):
        row = [v]
        for j in range(1, i + 1):
            ratio = h[i - j] / h[i]
            row.append(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (ratio - 1.0))
        table.append(row)
    last = table[-1]
    if len(last) == 1:
        return last[0], math.inf
    best_j = min(range(1, len(last)), key=lambda j: abs(last[j] - last[j - 1]))
    return last[best_j], abs(last[best_j] - last[best_j - 1])


def _fit_exponent(e0: float, e1: float, e2: float, ratio: float) -> Optional[float]:
    """解 (e0^q − e1^q)/(e1^q − e2^q) = ratio"""
    if ratio <= 1.0 or not math.isfinite(ratio):
        return None
    if math.isclose(e0 / e1, e1 / e2, rel_tol=1e-12):
        return math.log(ratio) / math.log(e1 / e2)

    def g(q: float) -> float:
        return (e0 ** q - e1 ** q) / (e1 ** q - e2 ** q) - ratio

    lo, hi = 1e-3, 20.0
    if g(lo) * g(hi) > 0:
        return None
    return brentq(g, lo, hi, xtol=1e-12)


def _aitken(eps: Sequence[float], values: Sequence[float]) -> Tuple[float, float, Optional[float], bool]:
    """逐级拟合指数的 Aitken-Richardson 消去；返回 (值, 误差, 首阶指数, 是否失败)"""
    stages = [list(values)]
    cur_e, cur_v = list(eps), list(values)
    leading: Optional[float] = None
    while len(cur_v) >= 3:
        scale = max(abs(v) for v in cur_v) or 1.0
        nxt: List[float] = []
        for i in range(len(cur_v) - 2):
            d1 = cur_v[i] - cur_v[i + 1]
            d2 = cur_v[i + 1] - cur_v[i + 2]
            if abs(d2) <= 1e-15 * scale:
                nxt.append(cur_v[i + 2])
                continue
            q = _fit_exponent(cur_e[i], cur_e[i + 1], cur_e[i + 2], d1 / d2)
            if q is None:
                return values[-1], 0.0, leading, True
            if leading is None:
                leading = q
            r = (cur_e[i + 1] / cur_e[i + 2]) ** q
            nxt.append(cur_v[i + 2] - d2 / (r - 1.0))
        cur_e, cur_v = cur_e[2:], nxt
        stages.append(cur_v)
    value = stages[-1][-1]
    error = abs(value - stages[-2][-1])
    if len(stages[-1]) > 1:
        error = max(error, abs(stages[-1][-1] - stages[-1][-2]))
    return value, error, leading, False


def extrapolate_to_zero(samples: Sequence[Tuple[float, float]], exponent: Optional[float] = None) -> ExtrapolationResult:
    """
    ε → 0 外推

    exponent 已知时按 ε^q 的幂做经典 Richardson 表；否则每一级用三个相邻样本拟合指数。
    误差估计取最后两级之差。序列不规则时退回最后一个原始样本，误差取样本的最大跨度并标记。

    Args:
        samples: (ε, 值) 列表，顺序任意
        exponent: 已知的展开首指数 q
    """
    pts = sorted(((float(e), float(v)) for e, v in samples), key=lambda p: -p[0])
    need = 2 if exponent is not None else 3
    if len(pts) < need:
        raise DomainError(f"外推至少需要 {need} 个样本，收到 {len(pts)}")
    if any(not math.isfinite(v) or e <= 0 for e, v in pts):
        raise DomainError("外推样本必须是有限值且 ε > 0")
    if len({e for e, _ in pts}) != len(pts):
        raise DomainError("外推样本的 ε 必须互不相同")
    eps = [e for e, _ in pts]
    values = [v for _, v in pts]
    spread = max(values) - min(values)

    if exponent is not None:
        value, error = _richardson(eps, values, exponent)
        flagged = _erratic(values)
        if flagged:
            error = max(error, spread)
        result = ExtrapolationResult(value=value, error_estimate=error, exponent=exponent, flagged=flagged)
    else:
        value, error, q, failed = _aitken(eps, values)
        if failed or _erratic(values):
            result = ExtrapolationResult(value=values[-1], error_estimate=max(spread, abs(values[-1] - values[-2])),
                                         exponent=q, flagged=True)
        else:
            result = ExtrapolationResult(value=value, error_estimate=error, exponent=q, flagged=False)

    if result.flagged:
        logger.warning(f"ε 序列不规则，外推退回原始样本 {result.value:.12g} (误差 {result.error_estimate:.2e})")
    else:
        logger.info(f"外推结果 {result.value:.12g} ± {result.error_estimate:.2e} (指数 {result.exponent})")
    return result


def u_n_extrapolated(model: SubordinatorModel, scheme: EpsilonScheme, n: int, x: float,
                     grid: Optional[GridConfig] = None) -> LadderResult:
    """沿 scheme.ladder 计算 u_{nε}(x) 并外推到 ε → 0"""
    samples: List[LadderSample] = []
    for eps in scheme.ladder:
        coeff = u_n_eps_detailed(model, scheme, eps, n, x, grid)
        samples.append(LadderSample(eps=eps, value=coeff.value, error_estimate=coeff.error_estimate,
                                    condition_number=coeff.condition_number))
    extrapolation = extrapolate_to_zero([(s.eps, s.value) for s in samples], scheme.effective_exponent)
    conds = [s.condition_number for s in samples]
    if any(b < a for a, b in zip(conds, conds[1:])):
        logger.info(f"{model.label} u_{n}({x:g}): 条件数沿阶梯并非单调不减 {['%.2e' % v for v in conds]}")
    return LadderResult(model=model.label, scheme=scheme.kind, n=n, x=x, samples=samples, extrapolation=extrapolation)


def series_p_eps(model: SubordinatorModel, scheme: SchemeLike, eps: float, x: float, t: float,
                 n_max: int = 40, tail_tol: float = 1e-12, grid: Optional[GridConfig] = None) -> float:
    """
    复合泊松近似下的分布函数 P_ε(X_t ≤ x) = Σ_{n≥0} U_{nε}(x) tⁿ/n!

    U_{0ε} = 1；n ≥ 1 时 u_{nε} 的绝对连续部分总积分为 −(−c)ⁿ，故
    U_{nε}(x) = −∫ₓ^∞ u_{nε} = (−c)ⁿ + ∫₀ˣ u_{nε}，由累积卷积幂组合得到。连续两项小于 tail_tol 即停止。

    Raises:
        SeriesNotConverged: n_max 项内未满足停止条件
    """
    if t < 0:
        raise DomainError(f"时间必须非负，收到 t = {t}")
    if x <= 0:
        raise DomainError(f"要求 x > 0，收到 x = {x}")
    if t == 0:
        return 1.0
    approx = get_approximation(model, scheme, eps, grid)
    c = approx.mass
    cumulative: List[float] = []
    terms = [1.0]
    small = 0
    for n in range(1, n_max + 1):
        cumulative.append(approx.cumulative_power(n, x).value.real)
        # k = 0 项对应原点处的原子 e^{−ct}δ₀
        big_u = math.fsum([(-c) ** n] + [(-1.0) ** (n - k) * math.comb(n, k) * c ** (n - k) * cumulative[k - 1]
                                         for k in range(1, n + 1)])
        term = big_u * math.exp(n * math.log(t) - math.lgamma(n + 1.0))
        terms.append(term)
        small = small + 1 if abs(term) < tail_tol else 0
        if small >= 2:
            value = math.fsum(terms)
            logger.info(f"{model.label} P_ε(x={x:g}; t={t:g}) = {value:.12g}, {n} 项 (ε = {eps:g})")
            return value
    value = math.fsum(terms)
    raise SeriesNotConverged(f"ε 级数在 {n_max} 项内未收敛 (x = {x}, t = {t}, ε = {eps})",
                             best_estimate=value, error_estimate=abs(terms[-1]))
