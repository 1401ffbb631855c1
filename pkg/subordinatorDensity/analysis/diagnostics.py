#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
可积性假设诊断

对 k = 0, …, m 估计 ∫₀^∞ e^{−rx} x^{k+1}|u^{(k)}(x)| dx：积分域 [q^{−j}, q^{j}] 按几何级数向 0 和 ∞ 扩展，
观察每次扩展带来的增量。结果只是标记，不阻止任何计算。
"""

import logging
import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DomainError, SubordinatorDensityError
from ..models.base import SubordinatorModel, central_derivative

logger = logging.getLogger("subordinatorDensity.analysis.diagnostics")

Flag = Literal["finite", "divergent", "inconclusive"]

_NODES_FINE, _W_FINE = np.polynomial.legendre.leggauss(32)
_NODES_COARSE, _W_COARSE = np.polynomial.legendre.leggauss(16)
_MAX_STEP = 0.05


class IntegrabilityReport(BaseModel):
    """
    每个 k 一个标记

    Args:
        estimates: 最大积分域上的部分积分
        increments: 每次扩展的增量（左右两段之和）
        unreliable: 该 k 是否出现过差分或求积不可靠的段
    """

    model: str
    m: int
    r: float
    flags: List[Flag]
    estimates: List[float]
    increments: List[List[float]] = Field(default_factory=list)
    unreliable: List[bool] = Field(default_factory=list)

    @property
    def all_finite(self) -> bool:
        return all(f == "finite" for f in self.flags)


def _derivative(model: SubordinatorModel, k: int, x: float) -> Tuple[float, bool]:
    """(u^{(k)}(x), 是否可靠)"""
    if k == 0 or model.levy_density_derivative is not None:
        return model.levy_derivative(k, x), True
    # 大 x 处步长不超过 _MAX_STEP，否则会跨过密度本身的振荡
    step = min(0.01 * x, _MAX_STEP)
    value, error = central_derivative(lambda y: float(np.real(model.levy_density(y))), k, x, step)
    # 以 |u(x)|/min(x, 1)^k 为量级，允许导数本身穿过零点
    scale = abs(value) + abs(float(np.real(model.levy_density(x)))) / min(x, 1.0) ** k
    return value, error <= 1e-3 * scale


def _piece(model: SubordinatorModel, k: int, r: float, a: float, b: float) -> Tuple[float, float, bool]:
    """log 变量下 [a, b] 上的 32 点与 16 点 Gauss-Legendre 结果，以及差分是否可靠"""
    la, lb = math.log(a), math.log(b)
    half, mid = 0.5 * (lb - la), 0.5 * (lb + la)
    reliable = True

    def g(s: float) -> float:
        nonlocal reliable
        x = math.exp(s)
        weight = math.exp(-r * x)
        if weight == 0.0:
            return 0.0
        d, ok = _derivative(model, k, x)
        reliable = reliable and ok
        return weight * x ** (k + 2) * abs(d)

    fine = half * sum(w * g(mid + half * s) for s, w in zip(_NODES_FINE, _W_FINE))
    coarse = half * sum(w * g(mid + half * s) for s, w in zip(_NODES_COARSE, _W_COARSE))
    return fine, coarse, reliable


def _classify(increments: List[float], total: float, unreliable: bool, rtol: float) -> Flag:
    last = increments[-3:]
    if not all(math.isfinite(d) for d in last) or not math.isfinite(total):
        return "divergent"
    growing = all(b >= 0.98 * a for a, b in zip(last, last[1:]))
    if growing and last[-1] > 1e-2 * total and last[-1] > 0:
        return "divergent"
    if unreliable:
        return "inconclusive"
    tiny = all(d <= rtol * total for d in last)
    geometric = all(b <= 0.9 * a for a, b in zip(last, last[1:])) and last[-1] <= 0.1 * total
    if tiny or geometric:
        return "finite"
    return "inconclusive"


def check_integrability_hypothesis(model: SubordinatorModel, m: int, r: float, expansions: int = 12,
                                   ratio: float = 4.0, rtol: float = 1e-3) -> IntegrabilityReport:
    """
    对 k = 0..m 标记 ∫₀^∞ e^{−rx}x^{k+1}|u^{(k)}(x)|dx 是否有限

    最近三次扩展的增量可忽略或按几何级数减小时标为 finite；三次都不减小时标为 divergent；
    差分或求积在某段上不可靠、或两种判据都不满足时标为 inconclusive。
    导数优先用模型的闭式，否则用 Richardson 加密的中心差分。
    """
    if m < 0:
        raise DomainError(f"导数阶数上限必须非负，收到 m = {m}")
    if r < 0:
        raise DomainError(f"指数权 r 必须非负，收到 r = {r}")
    if expansions < 3 or ratio <= 1.0:
        raise DomainError("至少需要 3 次扩展，且扩展比例大于 1")

    flags: List[Flag] = []
    estimates: List[float] = []
    all_increments: List[List[float]] = []
    unreliable_flags: List[bool] = []
    for k in range(m + 1):
        total = 0.0
        increments: List[float] = []
        unreliable = False
        for j in range(expansions):
            lo = ratio ** -j
            try:
                left, left_coarse, ok_left = _piece(model, k, r, lo / ratio, lo)
                right, right_coarse, ok_right = _piece(model, k, r, 1.0 / lo, ratio / lo)
            except (SubordinatorDensityError, OverflowError, ZeroDivisionError) as e:
                logger.debug(f"{model.label} k = {k} 第 {j} 次扩展求值失败: {e}")
                unreliable = True
                increments.append(0.0)
                continue
            total += left + right
            floor = 1e-3 * abs(total)
            for fine, coarse, ok in ((left, left_coarse, ok_left), (right, right_coarse, ok_right)):
                if not ok or abs(fine - coarse) > 0.05 * abs(fine) + floor:
                    unreliable = True
            increments.append(left + right)
        flag = _classify(increments, total, unreliable, rtol)
        flags.append(flag)
        estimates.append(total)
        all_increments.append(increments)
        unreliable_flags.append(unreliable)
        if flag != "finite":
            logger.warning(f"{model.label}: k = {k}, r = {r:g} 的可积性标记为 {flag} (部分积分 {total:.4e})")

    report = IntegrabilityReport(model=model.label, m=m, r=r, flags=flags, estimates=estimates,
                                 increments=all_increments, unreliable=unreliable_flags)
    logger.info(f"{model.label} 可积性诊断 m = {m}, r = {r:g}: {flags}")
    return report


def integrability_summary(report: IntegrabilityReport) -> Optional[str]:
    """不是全部 finite 时给出一行说明"""
    if report.all_finite:
        return None
    bad = [f"k={k}:{flag}" for k, flag in enumerate(report.flags) if flag != "finite"]
    return f"{report.model} 的可积性假设可能不成立 (r = {report.r:g}): " + ", ".join(bad)
