#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
卷积幂网格
PanelInterpolant 在对数面板上用 Chebyshev-Lobatto 节点对 log f 做重心插值；
ConvolutionPowers 记忆化非负核的 k 重卷积及其累积积分。
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from ..config.settings import GridConfig, QuadratureConfig
from ..errors import DomainError, NumericalError
from .quadrature import IntegralResult, convolve_at, integrate_finite

logger = logging.getLogger("subordinatorDensity.numerics.grids")

# 低于该值视为下溢，对应面板不参与对数插值
_TINY = 1e-290


def _lobatto(lo: float, hi: float, n: int) -> np.ndarray:
    """[lo, hi] 上升序排列的 Chebyshev-Lobatto 节点"""
    j = np.arange(n)
    nodes = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * j / (n - 1))
    nodes[0], nodes[-1] = lo, hi
    return nodes


class PanelInterpolant:
    """
    (start, start + span] 上正函数的分段插值

    s = z − start 按几何面板划分，每个面板在 log s 坐标下插值 log f；
    s ≤ 0 时返回 0，首节点以下按幂律外推（若 f 在那里已下溢则返回 0）。
    构造后不可变。
    """

    def __init__(self, start: float, edges: np.ndarray, panels: List[BarycentricInterpolator],
                 below: str, slope: float, log_first: float):
        self.start = float(start)
        self.edges = edges
        self._log_edges = np.log(edges)
        self._panels = panels
        self.below = below
        self.slope = slope
        self._log_first = log_first

    @classmethod
    def from_function(cls, func: Callable[[float], float], start: float, span: float,
                      cfg: GridConfig) -> "PanelInterpolant":
        """在网格节点上采样 func 并构造插值"""
        if span <= 0:
            raise DomainError(f"插值区间长度必须为正，收到 {span}")
        s_lo = span * cfg.lower_ratio
        count = max(1, math.ceil(math.log(span / s_lo) / math.log(cfg.panel_ratio)))
        edges = np.geomspace(s_lo, span, count + 1)
        log_edges = np.log(edges)
        end = start + span

        cache: Dict[float, float] = {}
        sampled: List[Tuple[np.ndarray, np.ndarray]] = []
        for lo, hi in zip(log_edges[:-1], log_edges[1:]):
            ell = _lobatto(lo, hi, cfg.nodes_per_panel)
            values = np.empty_like(ell)
            for i, e in enumerate(ell):
                key = float(e)
                if key not in cache:
                    # exp(log(span)) 可能比 span 大一个 ulp
                    cache[key] = float(func(min(start + math.exp(e), end)))
                values[i] = cache[key]
            sampled.append((ell, values))

        bad = [i for i, (_, v) in enumerate(sampled) if not np.all(v > _TINY)]
        first = bad[-1] + 1 if bad else 0
        if first >= len(sampled):
            raise NumericalError(f"插值函数在 (start={start}, span={span}] 上没有可用的正值")
        below = "zero" if bad else "power"
        kept = sampled[first:]
        panels = [BarycentricInterpolator(ell, np.log(v)) for ell, v in kept]
        ell0, v0 = kept[0]
        slope = (math.log(v0[1]) - math.log(v0[0])) / (ell0[1] - ell0[0])
        logger.debug(f"网格插值: {len(panels)} 个面板, {len(cache)} 次采样, 下端 {below}")
        return cls(start, edges[first:], panels, below, slope, math.log(v0[0]))

    @property
    def upper(self) -> float:
        return self.start + float(self.edges[-1])

    def __call__(self, z: float) -> float:
        s = z - self.start
        if s <= 0:
            return 0.0
        if s > self.edges[-1] * (1.0 + 1e-12):
            raise DomainError(f"插值点 {z} 超出网格上端 {self.upper}")
        ell = math.log(s)
        if s < self.edges[0]:
            if self.below == "zero":
                return 0.0
            return math.exp(self._log_first + self.slope * (ell - self._log_edges[0]))
        idx = int(np.searchsorted(self._log_edges, ell, side="right")) - 1
        idx = min(max(idx, 0), len(self._panels) - 1)
        return math.exp(float(self._panels[idx](ell)))


class ConvolutionPowers:
    """
    非负核 K 的卷积幂 K^{∗k}(x) 与累积积分 ∫₀ˣ K^{∗k}

    - k = 1 直接返回核
    - k ≤ direct_max_order 时嵌套调用 convolve_at
    - 更高阶由前一阶的 PanelInterpolant 与核卷积得到

    Args:
        kernel: 核函数 K，在 support_start 以下为 0
        x_max: 网格覆盖的上端，请求超出时自动扩展
        kernel_exponent: support_start = 0 时 K 在原点附近 y^s 行为中的 s
        support_start: K 的支撑起点（截断核为 ε）
        kernel_breaks: K 的不光滑点
    """

    def __init__(self, kernel: Callable[[float], float], quad_cfg: QuadratureConfig, grid_cfg: GridConfig,
                 x_max: float, kernel_exponent: Optional[float] = None, support_start: float = 0.0,
                 kernel_breaks: Sequence[float] = (), direct_max_order: Optional[int] = None,
                 name: str = "kernel"):
        if x_max <= 0:
            raise DomainError(f"x_max 必须为正，收到 {x_max}")
        self.kernel = kernel
        self.quad_cfg = quad_cfg
        self.grid_cfg = grid_cfg
        self.x_max = float(x_max)
        self.kernel_exponent = kernel_exponent if support_start == 0.0 else None
        self.support_start = float(support_start)
        self.kernel_breaks = tuple(kernel_breaks)
        self.direct_max_order = direct_max_order or grid_cfg.direct_max_order
        self.name = name
        self._powers: Dict[int, PanelInterpolant] = {}
        self._cumulatives: Dict[int, PanelInterpolant] = {}
        self._values: Dict[Tuple[str, int, float], IntegralResult] = {}

    def _start(self, k: int) -> float:
        return k * self.support_start

    def power_exponent(self, k: int) -> Optional[float]:
        """K^{∗k} 在原点附近的幂指数，非负时返回 None"""
        if self.kernel_exponent is None:
            return None
        s = k * (1.0 + self.kernel_exponent) - 1.0
        return s if s < 0.0 else None

    def _breaks(self, k: int) -> List[float]:
        return [self._start(k)] if self.support_start > 0 else []

    def _covers(self, grid: Optional[PanelInterpolant]) -> bool:
        return grid is not None and grid.upper >= self.x_max * (1.0 - 1e-12)

    def _ensure_range(self, x: float) -> None:
        if x <= self.x_max * (1.0 + 1e-12):
            return
        new_max = max(2.0 * self.x_max, 1.25 * x)
        logger.info(f"{self.name}: 网格上端从 {self.x_max:.4g} 扩展到 {new_max:.4g}")
        self.x_max = new_max
        self._powers.clear()
        self._cumulatives.clear()

    def _factor(self, k: int) -> Callable[[float], float]:
        """与核卷积的另一因子：k = 1 为核本身，k ≤ direct_max_order 为直接嵌套，否则为网格插值"""
        if k == 1:
            return self.kernel
        if k < self.direct_max_order:
            return lambda z: self.power(k, z)
        return self.interpolant(k)

    def power_result(self, k: int, x: float) -> IntegralResult:
        """K^{∗k}(x) 及其积分误差估计"""
        if k < 1:
            raise DomainError(f"卷积阶数必须 ≥ 1，收到 k = {k}")
        if x <= self._start(k):
            return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
        if k == 1:
            return IntegralResult(value=float(self.kernel(x)), error_estimate=0.0, evaluations=1)
        key = ("power", k, float(x))
        if key not in self._values:
            self._ensure_range(x)
            self._values[key] = convolve_at(
                self.kernel, self._factor(k - 1), x, self.quad_cfg,
                f_exponent=self.kernel_exponent, g_exponent=self.power_exponent(k - 1),
                f_breaks=self.kernel_breaks, g_breaks=self._breaks(k - 1),
            )
        return self._values[key]

    def power(self, k: int, x: float) -> float:
        return float(self.power_result(k, x).value.real)

    def interpolant(self, k: int) -> PanelInterpolant:
        """K^{∗k} 在 [0, x_max] 上的网格插值（首次调用或网格扩展后构造）"""
        # 构造过程中的采样可能触发扩展，此时刚建好的网格已经不够长
        while not self._covers(self._powers.get(k)):
            start = self._start(k)
            logger.debug(f"{self.name}: 构造 {k} 阶卷积幂网格")
            self._powers[k] = PanelInterpolant.from_function(
                lambda z: self.power(k, z), start, self.x_max - start, self.grid_cfg)
        return self._powers[k]

    def cumulative_result(self, k: int, x: float) -> IntegralResult:
        """∫₀ˣ K^{∗k}(y)dy，k ≥ 2 时利用 ∫₀ˣ (K ∗ G) = K ∗ ∫₀ G"""
        if k < 1:
            raise DomainError(f"卷积阶数必须 ≥ 1，收到 k = {k}")
        if x <= self._start(k):
            return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
        key = ("cumulative", k, float(x))
        if key not in self._values:
            self._ensure_range(x)
            if k == 1:
                lo = self.support_start
                cfg = self.quad_cfg.with_hints(self.kernel_exponent, None)
                self._values[key] = integrate_finite(self.kernel, lo, x, cfg, self.kernel_breaks)
            else:
                self._values[key] = convolve_at(
                    self.kernel, self.cumulative_interpolant(k - 1), x, self.quad_cfg,
                    f_exponent=self.kernel_exponent, f_breaks=self.kernel_breaks, g_breaks=self._breaks(k - 1),
                )
        return self._values[key]

    def cumulative(self, k: int, x: float) -> float:
        return float(self.cumulative_result(k, x).value.real)

    def cumulative_interpolant(self, k: int) -> PanelInterpolant:
        while not self._covers(self._cumulatives.get(k)):
            start = self._start(k)
            self._cumulatives[k] = PanelInterpolant.from_function(
                lambda z: self.cumulative(k, z), start, self.x_max - start, self.grid_cfg)
        return self._cumulatives[k]

    def validate_against_direct(self, k: int = 2, samples: int = 9) -> float:
        """
        比较 k 阶网格插值与直接卷积在节点之间的最大相对偏差，用于检验网格密度

        Returns:
            最大相对偏差
        """
        if k < 2:
            raise DomainError("网格校验需要 k ≥ 2")
        grid = self.interpolant(k)
        start = self._start(k)
        span = self.x_max - start
        points = start + np.geomspace(span * 1e-3, span * 0.97, samples) * (1.0 + 1.0 / (7.0 * samples))
        worst = 0.0
        for z in points:
            direct = convolve_at(self.kernel, self._factor(k - 1), float(z), self.quad_cfg,
                                 f_exponent=self.kernel_exponent, g_exponent=self.power_exponent(k - 1),
                                 f_breaks=self.kernel_breaks, g_breaks=self._breaks(k - 1)).value.real
            if direct != 0:
                worst = max(worst, abs(grid(float(z)) - direct) / abs(direct))
        logger.info(f"{self.name}: {k} 阶网格与直接卷积的最大相对偏差 {worst:.3e}")
        return worst
