#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
时间级数与多方法对照

    p(x; t) = Σ_{n≥1} uₙ(x) tⁿ/n!

系数可以来自闭式参照解、M1、M2 或 M3；compare_methods 在同一组 (x, t) 上并排计算各方法，
失败的格子只记录诊断信息，不中断整张表。
"""

import logging
import math
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field

from ..config.settings import ContourSpec, EpsilonScheme, GridConfig, InversionDefaults, Settings
from ..errors import CapabilityError, DomainError, SeriesNotConverged, SubordinatorDensityError
from ..methods.contour import p_bromwich_result, p_contour_result, u_n_contour_result
from ..methods.cp_approx import u2_stabilized, u_n_extrapolated
from ..methods.tail_conv import DampedInversionPlan, u_n_via_damped_inversion_result, u_n_via_derivative_result
from ..models.base import SubordinatorModel

logger = logging.getLogger("subordinatorDensity.analysis.series")

COEFFICIENT_METHODS = ("m1", "m1-stabilized", "m2", "m2-derivative", "m3", "oracle")
DENSITY_METHODS = ("bromwich", "contour", "series-m1", "series-m2", "series-m3", "series-oracle", "oracle")
DEFAULT_COEFFICIENT_METHODS = COEFFICIENT_METHODS
DEFAULT_DENSITY_METHODS = tuple(m for m in DENSITY_METHODS if m != "series-m1")

# 格子内的值都小于该量级时改用绝对偏差
_ZERO_FLOOR = 1e-8

Quantity = Literal["u_n", "p"]


def has_continuation(model: SubordinatorModel) -> bool:
    """有闭式延拓，或者满足通用构造的条件"""
    return model.continuation is not None or (model.stable_part is not None and model.levy_density_analytic)


def unsupported_reason(model: SubordinatorModel, method: str,
                       scheme: Optional[EpsilonScheme] = None) -> Optional[str]:
    """
    方法对模型不可用时返回原因，可用时返回 None

    Raises:
        DomainError: 未知的方法名
    """
    base = method[len("series-"):] if method.startswith("series-") else method
    if method not in COEFFICIENT_METHODS and method not in DENSITY_METHODS:
        raise DomainError(f"未知方法 '{method}'，可用方法: {', '.join(COEFFICIENT_METHODS + DENSITY_METHODS)}")
    if base in ("m3", "contour") and not has_continuation(model):
        return "没有解析延拓"
    if method == "oracle" and model.oracle_u_n is None and model.oracle_p is None:
        return "没有闭式参照解"
    if method == "series-oracle" and model.oracle_u_n is None:
        return "没有系数的闭式参照解"
    if base == "m1" and scheme is not None and scheme.kind == "semigroup" and model.oracle_p is None:
        return "semigroup 方案需要闭式密度"
    return None


class CoefficientSource:
    """
    n, x → (uₙ(x), 误差估计)

    结果按 (n, x) 缓存，同一个 x 上对多个 t 求和时系数只算一次。
    max_order 非 None 时，超过该阶的系数不可用。
    """

    def __init__(self, method: str, evaluate: Callable[[int, float], Tuple[float, float]],
                 max_order: Optional[int] = None):
        self.method = method
        self._evaluate = evaluate
        self.max_order = max_order
        self._memo: Dict[Tuple[int, float], Tuple[float, float]] = {}

    def __call__(self, n: int, x: float) -> Tuple[float, float]:
        if self.max_order is not None and n > self.max_order:
            raise CapabilityError(f"{self.method} 系数只覆盖 n ≤ {self.max_order}，请求 n = {n}")
        key = (n, float(x))
        if key not in self._memo:
            self._memo[key] = self._evaluate(n, x)
        return self._memo[key]


def coefficient_source(model: SubordinatorModel, method: str,
                       scheme: Optional[EpsilonScheme] = None,
                       grid: Optional[GridConfig] = None,
                       inversion: Optional[InversionDefaults] = None,
                       contour: Optional[ContourSpec] = None) -> CoefficientSource:
    """
    按方法名构造系数来源：oracle、m1、m1-stabilized、m2、m2-derivative、m3

    Raises:
        CapabilityError: 方法对该模型不可用
    """
    scheme = scheme or EpsilonScheme()
    reason = unsupported_reason(model, method, scheme)
    if reason is not None:
        raise CapabilityError(f"方法 {method} 不适用于模型 {model.label}: {reason}")
    quad = model.quadrature

    if method == "oracle":
        if model.oracle_u_n is None:
            raise CapabilityError(f"模型 {model.label} 没有系数的闭式参照解")

        def oracle(n: int, x: float) -> Tuple[float, float]:
            value = model.oracle_u_n(n, x)
            return value, 4e-16 * abs(value)

        return CoefficientSource(method, oracle, model.oracle_max_order)

    if method == "m1":
        def m1(n: int, x: float) -> Tuple[float, float]:
            ladder = u_n_extrapolated(model, scheme, n, x, grid)
            return ladder.value, ladder.error_estimate

        return CoefficientSource(method, m1)

    if method == "m1-stabilized":
        def stabilized(n: int, x: float) -> Tuple[float, float]:
            if n != 2:
                raise DomainError(f"稳定形式只给出 u₂，请求 n = {n}")
            value = u2_stabilized(model, x)
            return value, quad.tolerance_for(value)

        return CoefficientSource(method, stabilized, 2)

    if method == "m2":
        def m2(n: int, x: float) -> Tuple[float, float]:
            result = u_n_via_damped_inversion_result(model, DampedInversionPlan.from_defaults(n, inversion), x)
            return float(result.value.real), result.error_estimate

        return CoefficientSource(method, m2)

    if method == "m2-derivative":
        def m2_derivative(n: int, x: float) -> Tuple[float, float]:
            result = u_n_via_derivative_result(model, n, x, grid=grid)
            return float(result.value.real), result.error_estimate

        return CoefficientSource(method, m2_derivative)

    if method == "m3":
        spec = contour or ContourSpec()

        def m3(n: int, x: float) -> Tuple[float, float]:
            result = u_n_contour_result(model, spec, n, x)
            return float(result.value.real), result.error_estimate

        return CoefficientSource(method, m3)

    raise DomainError(f"'{method}' 不是系数方法，可用: {', '.join(COEFFICIENT_METHODS)}")


class CoefficientRow(BaseModel):
    x: float
    n: int
    method: str
    value: Optional[float] = None
    error_estimate: Optional[float] = None
    diagnostic: str = ""


class CoefficientTable(BaseModel):
    """uₙ(x) 表；行按 x、n、方法名排序"""

    model: str
    rows: List[CoefficientRow] = Field(default_factory=list)

    @property
    def methods(self) -> List[str]:
        return sorted({r.method for r in self.rows})

    @property
    def max_order(self) -> int:
        return max((r.n for r in self.rows), default=0)

    def lookup(self, n: int, x: float, method: Optional[str] = None) -> Tuple[float, float]:
        method = method or self._single_method()
        for row in self.rows:
            if row.n == n and row.method == method and math.isclose(row.x, x, rel_tol=1e-15, abs_tol=0.0):
                if row.value is None:
                    raise SeriesNotConverged(f"u_{n}({x:g}) [{method}] 计算失败: {row.diagnostic}")
                return row.value, row.error_estimate or 0.0
        raise DomainError(f"系数表中没有 u_{n}({x:g}) [{method}]")

    def source(self, method: Optional[str] = None) -> CoefficientSource:
        method = method or self._single_method()
        return CoefficientSource(method, lambda n, x: self.lookup(n, x, method), self.max_order)

    def _single_method(self) -> str:
        methods = self.methods
        if len(methods) != 1:
            raise DomainError(f"系数表包含多个方法 {methods}，需要指定其一")
        return methods[0]


def build_coefficient_table(model: SubordinatorModel, x_grid: Sequence[float], orders: Sequence[int],
                            methods: Sequence[str], settings: Optional[Settings] = None) -> CoefficientTable:
    """
    在 x_grid × orders 上用各方法计算 uₙ(x)

    Raises:
        CapabilityError: 某个方法对模型不可用（在计算前检查）
    """
    settings = settings or Settings()
    if any(x <= 0 for x in x_grid):
        raise DomainError("x 网格必须全部为正")
    if any(n < 1 for n in orders):
        raise DomainError("系数阶数必须 ≥ 1")
    sources = {m: _source_from_settings(model, m, settings) for m in sorted(set(methods))}
    rows: List[CoefficientRow] = []
    for x in x_grid:
        for n in orders:
            for method, source in sources.items():
                if method == "m1-stabilized" and n != 2:
                    continue
                rows.append(_coefficient_cell(model, source, n, x))
    table = CoefficientTable(model=model.label, rows=rows)
    failed = sum(r.value is None for r in rows)
    logger.info(f"{model.label} 系数表: {len(rows)} 个格子，失败 {failed} 个")
    return table


def _source_from_settings(model: SubordinatorModel, method: str, settings: Settings) -> CoefficientSource:
    return coefficient_source(model, method, scheme=settings.epsilon, grid=settings.grid,
                              inversion=settings.inversion, contour=settings.contour)


def _coefficient_cell(model: SubordinatorModel, source: CoefficientSource, n: int, x: float) -> CoefficientRow:
    try:
        value, error = source(n, x)
        return CoefficientRow(x=x, n=n, method=source.method, value=value, error_estimate=error)
    except SubordinatorDensityError as e:
        logger.error(f"{model.label} u_{n}({x:g}) [{source.method}] 失败: {e}")
        return CoefficientRow(x=x, n=n, method=source.method, diagnostic=f"{type(e).__name__}: {e}")


class SeriesResult(BaseModel):
    """
    级数部分和

    last_term_magnitude 只是余项的启发式代表，不是严格上界。
    """

    value: float
    terms_used: int = Field(..., ge=0)
    last_term_magnitude: float = Field(..., ge=0.0)
    source_method: str
    per_term_errors: List[float] = Field(default_factory=list)

    @property
    def error_estimate(self) -> float:
        return math.fsum(self.per_term_errors) + self.last_term_magnitude


CoefficientLike = Union[CoefficientSource, CoefficientTable, Callable[[int, float], Tuple[float, float]]]


def sum_series(coeffs: CoefficientLike, x: float, t: float, tail_tol: float = 1e-12, n_max: int = 40,
               scale: float = 1.0, noise_tol: float = 1e-6) -> SeriesResult:
    """
    Σ_{n=1}^N scale·uₙ(x) tⁿ/n!，N 取第一次出现连续两项可忽略的位置

    一项可忽略：|uₙ(x)tⁿ/n!| < tail_tol；或者系数的误差估计不小于其值的 10%，
    且该项与其误差之和不超过 noise_tol·|部分和|。后一条针对高阶系数被舍入误差淹没的来源（M2），
    这时继续求和只会累加噪声。

    Args:
        coeffs: 系数来源、系数表（单一方法）或 (n, x) → (值, 误差) 的函数
        scale: 系数的公共倍数；停止判据按未缩放的项判断，结果对 scale 线性
        noise_tol: 误差占主导的项相对部分和的停止阈值

    Raises:
        SeriesNotConverged: n_max（或系数来源的最高阶）内未满足停止条件
    """
    if isinstance(coeffs, CoefficientTable):
        coeffs = coeffs.source()
    method = getattr(coeffs, "method", "custom")
    if t == 0:
        return SeriesResult(value=0.0, terms_used=0, last_term_magnitude=0.0, source_method=method)
    budget = n_max
    max_order = getattr(coeffs, "max_order", None)
    if max_order is not None:
        budget = min(budget, max_order)

    terms: List[float] = []
    errors: List[float] = []
    small = 0
    weight = 1.0
    for n in range(1, budget + 1):
        weight *= t / n
        value, error = coeffs(n, x)
        term = value * weight
        term_error = abs(error * weight)
        terms.append(term)
        errors.append(term_error)
        noisy = error > 0 and abs(error) >= 0.1 * abs(value)
        negligible = abs(term) < tail_tol or (
            noisy and abs(term) + term_error <= noise_tol * abs(math.fsum(terms)))
        small = small + 1 if negligible else 0
        if small >= 2:
            result = SeriesResult(value=scale * math.fsum(terms), terms_used=n, last_term_magnitude=abs(scale * term),
                                  source_method=method, per_term_errors=[abs(scale) * e for e in errors])
            logger.debug(f"p({x:g}; {t:g}) [{method}] 级数 {n} 项 = {result.value:.12g}")
            return result

    best = scale * math.fsum(terms)
    logger.warning(f"p({x:g}; {t:g}) [{method}] 级数在 {budget} 项后截断，末项 {abs(terms[-1]):.2e}")
    raise SeriesNotConverged(f"时间级数在 {budget} 项内未收敛 (x = {x}, t = {t}, 方法 {method})",
                             best_estimate=best, error_estimate=abs(scale * terms[-1]))


class ComparisonRow(BaseModel):
    quantity: Quantity
    order: float = Field(..., description="系数阶数 n 或时间 t")
    x: float
    method: str
    value: Optional[float] = None
    error_estimate: Optional[float] = None
    diagnostic: str = ""


def _deviation(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale < _ZERO_FLOOR:
        return abs(a - b)
    return abs(a - b) / scale


class ComparisonReport(BaseModel):
    """多方法对照表；一个格子是 (量, n 或 t, x)"""

    model: str
    x_grid: List[float]
    t_grid: List[float]
    orders: List[int]
    methods: List[str]
    rows: List[ComparisonRow] = Field(default_factory=list)

    def cells(self) -> List[Tuple[str, float, float]]:
        seen: Dict[Tuple[str, float, float], None] = {}
        for r in self.rows:
            seen.setdefault((r.quantity, r.order, r.x), None)
        return list(seen)

    def values(self, quantity: str, order: float, x: float, include_oracle: bool = False) -> Dict[str, float]:
        return {r.method: r.value for r in self.rows
                if (r.quantity, r.order, r.x) == (quantity, order, x) and r.value is not None
                and (include_oracle or r.method != "oracle")}

    def cell_pairwise_deviation(self, quantity: str, order: float, x: float) -> Optional[float]:
        vals = list(self.values(quantity, order, x).values())
        if len(vals) < 2:
            return None
        return max(_deviation(a, b) for i, a in enumerate(vals) for b in vals[i + 1:])

    def cell_oracle_deviation(self, quantity: str, order: float, x: float) -> Optional[float]:
        vals = self.values(quantity, order, x, include_oracle=True)
        if "oracle" not in vals:
            return None
        ref = vals.pop("oracle")
        if not vals:
            return None
        return max(_deviation(v, ref) for v in vals.values())

    def max_pairwise_deviation(self, quantity: Optional[str] = None) -> Optional[float]:
        devs = [d for q, o, x in self.cells() if quantity in (None, q)
                for d in [self.cell_pairwise_deviation(q, o, x)] if d is not None]
        return max(devs) if devs else None

    def oracle_deviation(self, quantity: Optional[str] = None) -> Optional[float]:
        devs = [d for q, o, x in self.cells() if quantity in (None, q)
                for d in [self.cell_oracle_deviation(q, o, x)] if d is not None]
        return max(devs) if devs else None

    @property
    def failures(self) -> List[ComparisonRow]:
        return [r for r in self.rows if r.value is None]

    def to_rows(self) -> List[ComparisonRow]:
        """各格子的方法行，后接该格子的汇总行（max_pairwise_deviation、oracle_deviation）"""
        out: List[ComparisonRow] = []
        for q, o, x in self.cells():
            out.extend(r for r in self.rows if (r.quantity, r.order, r.x) == (q, o, x))
            pairwise = self.cell_pairwise_deviation(q, o, x)
            if pairwise is not None:
                out.append(ComparisonRow(quantity=q, order=o, x=x, method="max_pairwise_deviation",
                                         value=pairwise, error_estimate=0.0))
            oracle = self.cell_oracle_deviation(q, o, x)
            if oracle is not None:
                out.append(ComparisonRow(quantity=q, order=o, x=x, method="oracle_deviation",
                                         value=oracle, error_estimate=0.0))
        return out


def _ordered(methods: Sequence[str], canonical: Sequence[str]) -> List[str]:
    return [m for m in canonical if m in methods]


def compare_methods(model: SubordinatorModel, x_grid: Sequence[float], t_grid: Sequence[float],
                    settings: Optional[Settings] = None, orders: Sequence[int] = (1, 2, 3),
                    methods: Optional[Sequence[str]] = None) -> ComparisonReport:
    """
    在 x_grid 上并排计算 uₙ(x)（n ∈ orders）与 p(x; t)（t ∈ t_grid）

    methods 为 None 时使用全部默认方法（series-m1 只在显式请求时计算）。
    不适用于该模型的方法在计算前剔除；单个格子的失败记录在 diagnostic 中。
    """
    settings = settings or Settings()
    requested = list(methods) if methods is not None else list(DEFAULT_COEFFICIENT_METHODS + DEFAULT_DENSITY_METHODS)
    for m in requested:
        unsupported_reason(model, m)
    applicable = []
    for m in dict.fromkeys(requested):
        reason = unsupported_reason(model, m, settings.epsilon)
        if reason is None:
            applicable.append(m)
        else:
            logger.info(f"{model.label}: 跳过方法 {m} ({reason})")

    coeff_methods = _ordered(applicable, COEFFICIENT_METHODS)
    if model.oracle_u_n is None and "oracle" in coeff_methods:
        coeff_methods.remove("oracle")
    density_methods = _ordered(applicable, DENSITY_METHODS)
    if model.oracle_p is None and "oracle" in density_methods:
        density_methods.remove("oracle")

    sources = {m: _source_from_settings(model, m, settings) for m in coeff_methods}
    series_sources = {m: _source_from_settings(model, m[len("series-"):], settings)
                      for m in density_methods if m.startswith("series-")}

    rows: List[ComparisonRow] = []
    for n in orders:
        for x in x_grid:
            for method in coeff_methods:
                if method == "m1-stabilized" and n != 2:
                    continue
                cell = _coefficient_cell(model, sources[method], n, x)
                rows.append(ComparisonRow(quantity="u_n", order=n, x=x, method=method, value=cell.value,
                                          error_estimate=cell.error_estimate, diagnostic=cell.diagnostic))
    for t in t_grid:
        for x in x_grid:
            for method in density_methods:
                rows.append(_density_cell(model, method, x, t, settings, series_sources))

    report = ComparisonReport(model=model.label, x_grid=list(x_grid), t_grid=list(t_grid), orders=list(orders),
                              methods=coeff_methods + [m for m in density_methods if m not in coeff_methods],
                              rows=rows)
    logger.info(f"{model.label} 对照完成: {len(rows)} 个格子，失败 {len(report.failures)} 个，"
                f"最大两两偏差 {report.max_pairwise_deviation()}")
    return report


def _density_cell(model: SubordinatorModel, method: str, x: float, t: float, settings: Settings,
                  series_sources: Dict[str, CoefficientSource]) -> ComparisonRow:
    try:
        if method == "oracle":
            value, error = model.oracle_p(x, t), 0.0
        elif method == "bromwich":
            result = p_bromwich_result(model, x, t, settings.inversion.c, settings.quadrature)
            value, error = float(result.value.real), result.error_estimate
        elif method == "contour":
            result = p_contour_result(model, settings.contour, x, t, settings.quadrature)
            value, error = float(result.value.real), result.error_estimate
        else:
            series = sum_series(series_sources[method], x, t, settings.series.tail_tol, settings.series.n_max,
                                noise_tol=settings.series.noise_tol)
            value, error = series.value, series.error_estimate
        return ComparisonRow(quantity="p", order=t, x=x, method=method, value=value, error_estimate=error)
    except SubordinatorDensityError as e:
        logger.error(f"{model.label} p({x:g}; {t:g}) [{method}] 失败: {e}")
        return ComparisonRow(quantity="p", order=t, x=x, method=method, diagnostic=f"{type(e).__name__}: {e}")


def build_density_rows(model: SubordinatorModel, x_grid: Sequence[float], t_grid: Sequence[float],
                       methods: Sequence[str], settings: Optional[Settings] = None) -> List[ComparisonRow]:
    """
    在 x_grid × t_grid 上用各密度方法计算 p(x; t)，行按 x、t、方法名排序

    Raises:
        CapabilityError: 某个方法对模型不可用（在计算前检查）
    """
    settings = settings or Settings()
    if any(x <= 0 for x in x_grid):
        raise DomainError("x 网格必须全部为正")
    chosen = sorted(set(methods))
    for method in chosen:
        if method not in DENSITY_METHODS:
            raise DomainError(f"'{method}' 不是密度方法，可用: {', '.join(DENSITY_METHODS)}")
        reason = unsupported_reason(model, method, settings.epsilon)
        if method == "oracle" and model.oracle_p is None:
            reason = "没有闭式密度"
        if reason is not None:
            raise CapabilityError(f"方法 {method} 不适用于模型 {model.label}: {reason}")
    series_sources = {m: _source_from_settings(model, m[len("series-"):], settings)
                      for m in chosen if m.startswith("series-")}
    rows = [_density_cell(model, method, x, t, settings, series_sources)
            for x in x_grid for t in t_grid for method in chosen]
    logger.info(f"{model.label} 密度表: {len(rows)} 个格子，失败 {sum(r.value is None for r in rows)} 个")
    return rows
