#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数值积分内核
- 有限区间与半无穷区间的自适应积分（scipy.integrate.quad），端点奇异性用代数换元处理
- (0, ∞) 上两个函数的卷积
- 竖线 Bromwich 积分与倾斜双射线围道积分（向量化 Gauss-Legendre）
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..config.settings import ContourSpec, QuadratureConfig
from ..errors import ContourError, DomainError, NumericalError, QuadratureNonConvergence, SlowDecayError

logger = logging.getLogger("subordinatorDensity.numerics.quadrature")

RealFunction = Callable[[float], float]
ComplexArrayFunction = Callable[[np.ndarray], np.ndarray]

# quad 的误差估计超出容差这么多倍才视为失败；略超容差多半是舍入误差告警
_FAILURE_SLACK = 1e3

_MACHINE_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class IntegralResult:
    """积分结果：数值、误差估计、被积函数求值次数、虚部残差"""

    value: complex
    error_estimate: float
    evaluations: int
    imag_residual: float = 0.0

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError(f"误差估计必须非负: {self.error_estimate}")


def _check_outcome(value: float, error: float, message: Optional[str], cfg: QuadratureConfig, what: str) -> None:
    tolerance = cfg.tolerance_for(value)
    if message is None or error <= _FAILURE_SLACK * tolerance:
        if message is not None:
            logger.debug(f"{what}: quad 提示 '{message.splitlines()[0]}'，误差 {error:.3e} 仍在容差内")
        return
    text = f"{what} 未收敛: 误差估计 {error:.3e} 超过容差 {tolerance:.3e} ({message.splitlines()[0]})"
    if cfg.raise_on_failure:
        raise QuadratureNonConvergence(text, best_estimate=value, error_estimate=error)
    logger.warning(text)


def _quad(f: RealFunction, a: float, b: float, cfg: QuadratureConfig,
          points: Optional[Sequence[float]] = None, what: str = "积分") -> IntegralResult:
    """对 scipy quad 的薄封装，统一容差、细分上限与失败处理"""
    inner = sorted(p for p in (points or ()) if a < p < b) if math.isfinite(b) else None
    out = integrate.quad(f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
                         points=inner or None, full_output=1)
    value, error, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else None
    if not math.isfinite(value):
        raise QuadratureNonConvergence(f"{what} 得到非有限值 {value}", best_estimate=value, error_estimate=math.inf)
    _check_outcome(value, error, message, cfg, what)
    logger.debug(f"{what} [{a:.4g}, {b:.4g}]: {value:.12g} ± {error:.2e}, {info['neval']} 次求值")
    return IntegralResult(value=value, error_estimate=error, evaluations=info["neval"])


def _combine(parts: Sequence[IntegralResult]) -> IntegralResult:
    return IntegralResult(
        value=math.fsum(p.value.real for p in parts),
        error_estimate=sum(p.error_estimate for p in parts),
        evaluations=sum(p.evaluations for p in parts),
    )


def _left_mapped(f: RealFunction, a: float, s: float) -> Tuple[RealFunction, Callable[[float], float]]:
    """y = a + u^q, q = 1/(1+s)，使 (y−a)^s 型奇异性变为有界"""
    q = 1.0 / (1.0 + s)

    def g(u: float) -> float:
        return q * u ** (q - 1.0) * f(a + u ** q) if u > 0 else 0.0

    return g, lambda y: (y - a) ** (1.0 + s)


def _right_mapped(f: RealFunction, b: float, s: float) -> Tuple[RealFunction, Callable[[float], float]]:
    """y = b − u^q"""
    q = 1.0 / (1.0 + s)

    def g(u: float) -> float:
        return q * u ** (q - 1.0) * f(b - u ** q) if u > 0 else 0.0

    return g, lambda y: (b - y) ** (1.0 + s)


def _hint(s: Optional[float]) -> Optional[float]:
    return s if s is not None and s < 0.0 else None


def integrate_finite(f: RealFunction, a: float, b: float, cfg: QuadratureConfig,
                     points: Optional[Sequence[float]] = None) -> IntegralResult:
    """
    有限区间积分 ∫ₐᵇ f(y)dy

    cfg.origin_singularity_exponent / end_singularity_exponent 给出 f 在 a、b 附近 (y−a)^s 型行为，
    对应端点用 y − a = u^{1/(1+s)} 换元；两端都奇异时在中点拆分。

    Raises:
        DomainError: a > b
        QuadratureNonConvergence: 细分上限内未达到容差
    """
    if b < a:
        raise DomainError(f"积分区间要求 a ≤ b，收到 a = {a}, b = {b}")
    if a == b:
        return IntegralResult(value=0.0, error_estimate=0.0, evaluations=0)
    s0 = _hint(cfg.origin_singularity_exponent)
    s1 = _hint(cfg.end_singularity_exponent)
    points = list(points or ())

    if s0 is None and s1 is None:
        return _quad(f, a, b, cfg, points)

    if s0 is not None and s1 is not None:
        m = 0.5 * (a + b)
        left = integrate_finite(f, a, m, cfg.with_hints(s0, None), [p for p in points if p < m])
        right = integrate_finite(f, m, b, cfg.with_hints(None, s1), [p for p in points if p > m])
        return _combine([left, right])

    if s0 is not None:
        g, to_u = _left_mapped(f, a, s0)
    else:
        g, to_u = _right_mapped(f, b, s1)
    upper = to_u(b) if s0 is not None else to_u(a)
    return _quad(g, 0.0, upper, cfg, [to_u(p) for p in points if a < p < b], what="换元积分")


def integrate_semi_infinite(f: RealFunction, a: float, decay_rate: float, cfg: QuadratureConfig,
                            points: Optional[Sequence[float]] = None) -> IntegralResult:
    """
    指数衰减被积函数的半无穷积分 ∫ₐ^∞ f(y)dy

    在 T = a + (ln(1/abs_tol) + 5)/decay_rate 处截断，[a, T] 按衰减尺度分段
    """
    if decay_rate <= 0:
        raise DomainError(f"decay_rate 必须为正，收到 {decay_rate}")
    span = (math.log(1.0 / cfg.abs_tol) + 5.0) / decay_rate
    panels = 8
    breaks = [a + span * k / panels for k in range(1, panels)]
    return integrate_finite(f, a, a + span, cfg.with_hints(cfg.origin_singularity_exponent, None),
                            sorted(set(breaks) | set(points or ())))


def integrate_to_infinity(f: RealFunction, a: float, cfg: QuadratureConfig) -> IntegralResult:
    """代数衰减被积函数的 ∫ₐ^∞ f，使用 QUADPACK 的无穷区间映射"""
    if _hint(cfg.origin_singularity_exponent) is None:
        return _quad(f, a, math.inf, cfg, what="无穷区间积分")
    head = integrate_finite(f, a, a + 1.0, cfg.with_hints(cfg.origin_singularity_exponent, None))
    tail = _quad(f, a + 1.0, math.inf, cfg, what="无穷区间积分")
    return _combine([head, tail])


def integrate_complex(f: Callable[[float], complex], a: float, b: float, cfg: QuadratureConfig) -> IntegralResult:
    """复值被积函数，实部与虚部分别积分"""
    re = integrate_finite(lambda y: f(y).real, a, b, cfg)
    im = integrate_finite(lambda y: f(y).imag, a, b, cfg)
    return IntegralResult(value=complex(re.value.real, im.value.real),
                          error_estimate=math.hypot(re.error_estimate, im.error_estimate),
                          evaluations=re.evaluations + im.evaluations)


def _qawf(f: RealFunction, a: float, omega: float, weight: str, cfg: QuadratureConfig) -> Tuple[float, float, int]:
    out = integrate.quad(f, a, math.inf, weight=weight, wvar=omega, epsabs=cfg.abs_tol,
                         limlst=max(50, cfg.max_subdivisions // 4), full_output=1)
    value, error, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else None
    if not math.isfinite(value):
        raise QuadratureNonConvergence(f"Fourier 积分得到非有限值 {value}", best_estimate=value,
                                       error_estimate=math.inf)
    _check_outcome(value, error, message, cfg, "Fourier 积分")
    return value, error, int(info.get("neval", 0)) if isinstance(info, dict) else 0


def integrate_fourier(f: Callable[[float], complex], a: float, omega: float,
                      cfg: QuadratureConfig) -> IntegralResult:
    """
    ∫ₐ^∞ f(y)e^{−iωy}dy，f 为复值且绝对可积

    ω ≠ 0 时实部与虚部分别用 QUADPACK 的 QAWF（cos/sin 权）积分，共四次；ω = 0 时退化为普通无穷积分。
    """
    if omega == 0:
        re = integrate_to_infinity(lambda y: f(y).real, a, cfg)
        im = integrate_to_infinity(lambda y: f(y).imag, a, cfg)
        return IntegralResult(value=complex(re.value.real, im.value.real),
                              error_estimate=re.error_estimate + im.error_estimate,
                              evaluations=re.evaluations + im.evaluations)
    sign = 1.0 if omega > 0 else -1.0
    w = abs(omega)
    c_re, e1, n1 = _qawf(lambda y: f(y).real, a, w, "cos", cfg)
    c_im, e2, n2 = _qawf(lambda y: f(y).imag, a, w, "cos", cfg)
    s_re, e3, n3 = _qawf(lambda y: f(y).real, a, w, "sin", cfg)
    s_im, e4, n4 = _qawf(lambda y: f(y).imag, a, w, "sin", cfg)
    # e^{−iωy} = cos(wy) − i·sign·sin(wy)
    value = complex(c_re + sign * s_im, c_im - sign * s_re)
    return IntegralResult(value=value, error_estimate=e1 + e2 + e3 + e4, evaluations=n1 + n2 + n3 + n4)


def convolve_at(f: RealFunction, g: RealFunction, x: float, cfg: QuadratureConfig,
                f_exponent: Optional[float] = None, g_exponent: Optional[float] = None,
                f_breaks: Sequence[float] = (), g_breaks: Sequence[float] = ()) -> IntegralResult:
    """
    (f ∗ g)(x) = ∫₀ˣ f(y)g(x−y)dy

    在 x/2 处拆分，后半段镜像为 ∫₀^{x/2} f(x−y)g(y)dy，使每个因子的奇异性都落在左端点 0；
    交换 f 与 g 只交换两个半段的顺序，因此结果严格对称。

    Args:
        f_exponent, g_exponent: f、g 在 0 附近 y^s 行为中的 s
        f_breaks, g_breaks: f、g 自身坐标下的不光滑点
    """
    if x <= 0:
        raise DomainError(f"卷积点必须为正，收到 x = {x}")
    half = 0.5 * x

    def first(y: float) -> float:
        return f(y) * g(x - y)

    def second(y: float) -> float:
        return f(x - y) * g(y)

    first_points = [p for p in f_breaks] + [x - p for p in g_breaks]
    second_points = [p for p in g_breaks] + [x - p for p in f_breaks]
    part_f = integrate_finite(first, 0.0, half, cfg.with_hints(f_exponent, None), first_points)
    part_g = integrate_finite(second, 0.0, half, cfg.with_hints(g_exponent, None), second_points)
    return _combine([part_f, part_g])


def wynn_epsilon(partial_sums: Sequence[float]) -> Tuple[float, float]:
    """
    Wynn ε 算法加速部分和序列

    Returns:
        (极限估计, 误差估计)，误差取最后两个偶数列估计之差
    """
    s = [float(v) for v in partial_sums]
    if not s:
        raise DomainError("wynn_epsilon 需要至少一个部分和")
    if len(s) < 3:
        return s[-1], abs(s[-1] - s[0]) if len(s) > 1 else math.inf

    estimates = [s[-1]]
    e_prev: List[float] = [0.0] * (len(s) + 1)
    e_cur = s
    column = 0
    while len(e_cur) > 1:
        e_next: List[float] = []
        for j in range(len(e_cur) - 1):
            diff = e_cur[j + 1] - e_cur[j]
            if diff == 0.0 or not math.isfinite(diff):
                e_next = []
                break
            e_next.append(e_prev[j + 1] + 1.0 / diff)
        if not e_next:
            break
        column += 1
        e_prev, e_cur = e_cur, e_next
        if column % 2 == 0:
            estimates.append(e_cur[-1])
    if len(estimates) == 1:
        return s[-1], abs(s[-1] - s[-2])
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def _gauss(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


def _evaluate(F: ComplexArrayFunction, theta: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(F(theta), dtype=complex)
    if values.shape != theta.shape:
        values = np.broadcast_to(values, theta.shape)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"{what}: 被积函数出现非有限值")
    return values


def bromwich_integral(F: ComplexArrayFunction, c: float, x: float, cfg: QuadratureConfig,
                      with_magnitude: bool = False) -> IntegralResult:
    """
    竖线反演积分 (1/2πi)∫_{c−i∞}^{c+i∞} F(θ)e^{θx}dθ

    按半周期 π/x 分块，每块用向量化 Gauss-Legendre；θ 与其共轭成对求和，实部为结果，
    虚部为残差。绝对收敛时直接截断，否则对逐块部分和做 Wynn ε 加速。
    误差估计包含舍入下限 eps·Σw|F|·e^{cx}/2π，结果相消严重时它占主导。

    Args:
        F: 接受 numpy 复数组的向量化函数
        with_magnitude: 为 True 时 F 返回 (值, 舍入量级)，量级用于替代 |F|，
            供逐点求值本身就有相消的被积函数使用

    Raises:
        SlowDecayError: 累计 max_half_periods 个半周期后仍未收敛
    """
    if x <= 0:
        raise DomainError(f"反演点必须为正，收到 x = {x}")
    t, w = _gauss(cfg.line_nodes)
    half_period = math.pi / x
    prefactor = math.exp(c * x) / (2.0 * math.pi)
    base_scale = max(1.0, abs(c))

    def sample(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if not with_magnitude:
            values = _evaluate(F, theta, "Bromwich")
            return values, np.abs(values)
        raw, raw_magnitude = F(theta)
        values = _evaluate(lambda _: raw, theta, "Bromwich")
        magnitude = np.broadcast_to(np.abs(np.asarray(raw_magnitude)), theta.shape)
        return values, np.maximum(magnitude, np.abs(values))

    def block_integrals(first: int, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        # 一批半周期的节点拼在一起求值，再按块分段求和
        ys: List[np.ndarray] = []
        ws: List[np.ndarray] = []
        for k in range(first, first + count):
            y0 = k * half_period
            # 被积函数在高度 y 处的特征尺度约为 max(c, y)
            sub = max(1, math.ceil(half_period / max(base_scale, 0.5 * y0)))
            edges = y0 + half_period * np.arange(sub + 1) / sub
            mid = 0.5 * (edges[1:] + edges[:-1])
            rad = 0.5 * (edges[1:] - edges[:-1])
            ys.append((mid[:, None] + rad[:, None] * t[None, :]).ravel())
            ws.append((rad[:, None] * w[None, :]).ravel())
        offsets = np.cumsum([0] + [len(y) for y in ys[:-1]])
        y = np.concatenate(ys)
        weights = np.concatenate(ws)
        phase = np.exp(1j * y * x)
        upper, upper_abs = sample(c + 1j * y)
        lower, lower_abs = sample(c - 1j * y)
        pairs = np.add.reduceat(weights * (upper * phase + lower * np.conj(phase)), offsets)
        abs_parts = np.add.reduceat(weights * (upper_abs + lower_abs), offsets)
        return pairs.real.copy(), pairs.imag.copy(), abs_parts, 2 * y.size

    blocks_re: List[float] = []
    blocks_im: List[float] = []
    partial: List[float] = []
    magnitude = 0.0
    evaluations = 0
    batch = 16
    best = math.nan
    best_error = math.inf
    while len(blocks_re) < cfg.max_half_periods:
        count = min(batch, cfg.max_half_periods - len(blocks_re))
        re_parts, im_parts, abs_parts, n_eval = block_integrals(len(blocks_re), count)
        evaluations += n_eval
        blocks_re.extend(re_parts.tolist())
        blocks_im.extend(im_parts.tolist())
        magnitude += math.fsum(abs_parts.tolist())
        running = partial[-1] if partial else 0.0
        for v in re_parts:
            running += v
            partial.append(running)

        total = math.fsum(blocks_re)
        rounding = _MACHINE_EPS * magnitude
        # 舍入下限以下的容差达不到
        tolerance = max(cfg.tolerance_for(prefactor * total) / prefactor, rounding)
        last = abs(blocks_re[-1]) + abs(blocks_re[-2])
        residual = prefactor * abs(math.fsum(blocks_im))
        if last < 0.1 * tolerance:
            logger.debug(f"Bromwich 绝对收敛: {len(blocks_re)} 个半周期, {evaluations} 次求值, "
                         f"舍入下限 {prefactor * rounding:.2e}")
            return IntegralResult(value=prefactor * total, error_estimate=prefactor * (last + rounding),
                                  evaluations=evaluations, imag_residual=residual)

        window = partial[-24:]
        limit, err = wynn_epsilon(window)
        limit_prev, _ = wynn_epsilon(partial[-25:-1])
        spread = max(err, abs(limit - limit_prev))
        if spread < best_error:
            best, best_error = limit, spread
        if spread < tolerance:
            logger.debug(f"Bromwich 加速收敛: {len(blocks_re)} 个半周期, 外推差 {prefactor * spread:.2e}")
            return IntegralResult(value=prefactor * limit, error_estimate=prefactor * (spread + rounding),
                                  evaluations=evaluations, imag_residual=residual)
        batch = min(2 * batch, 256)

    raise SlowDecayError(
        f"Bromwich 积分在 {cfg.max_half_periods} 个半周期内未收敛 (x = {x}, c = {c})",
        best_estimate=prefactor * best, error_estimate=prefactor * best_error,
    )


def _ray_panels(corner_step: float, cap: float, radius: float) -> np.ndarray:
    """从角点出发几何加密的面板端点，面板长度不超过 cap"""
    edges = [0.0]
    step = min(corner_step, cap)
    while edges[-1] < radius:
        edges.append(min(edges[-1] + step, radius))
        step = min(2.0 * step, cap)
    return np.asarray(edges)


def _ray_sum(F: ComplexArrayFunction, c: float, direction: complex, x: float, edges: np.ndarray,
             t: np.ndarray, w: np.ndarray) -> complex:
    mid = 0.5 * (edges[1:] + edges[:-1])
    rad = 0.5 * (edges[1:] - edges[:-1])
    r = (mid[:, None] + rad[:, None] * t[None, :]).ravel()
    weights = (rad[:, None] * w[None, :]).ravel()
    theta = c + r * direction
    values = _evaluate(F, theta, "射线积分") * np.exp(theta * x)
    return complex(np.sum(weights * values) * direction)


def ray_pair_integral(F: ComplexArrayFunction, spec: ContourSpec, x: float, cfg: QuadratureConfig) -> IntegralResult:
    """
    双射线围道积分 (1/2πi)∫_C F(θ)e^{θx}dθ

    C 由角点 c 出发、方向 e^{±i(π/2+ψ)} 的两条射线组成，下方射线朝角点、上方射线离开角点。
    截断半径 R 满足 e^{cx − R·x·sinψ}·max|F| < abs_tol/10；误差估计为粗细两套节点之差
    加上共轭残差。

    Raises:
        ContourError: 几何参数无效、显式截断半径过短或面板数超出 max_subdivisions
    """
    if x <= 0:
        raise DomainError(f"围道积分点必须为正，收到 x = {x}")
    angle = spec.ray_angle
    if angle <= math.pi / 2 or angle >= math.pi:
        raise ContourError(f"射线角 {angle:.4f} 必须位于 (π/2, π) 内")
    c = spec.c
    up = complex(math.cos(angle), math.sin(angle))
    down = up.conjugate()
    decay = x * math.sin(spec.psi)
    target = cfg.abs_tol / 10.0

    def max_abs(radii: np.ndarray) -> float:
        values = np.concatenate([np.abs(_evaluate(F, c + radii * up, "射线积分")),
                                 np.abs(_evaluate(F, c + radii * down, "射线积分"))])
        return float(np.max(values))

    def envelope(radius: float, bound: float) -> float:
        return math.exp(c * x - radius * decay) * bound

    if spec.truncation_radius is not None:
        radius = spec.truncation_radius
        bound = max_abs(np.geomspace(1e-3, radius, 32))
        if envelope(radius, bound) > target * 10.0:
            raise ContourError(
                f"截断半径 R = {radius} 过短: 端点处被积函数量级 {envelope(radius, bound):.2e} 超过容差")
    else:
        radius = (c * x + math.log(10.0 / cfg.abs_tol)) / decay
        for _ in range(8):
            bound = max(max_abs(np.geomspace(1e-3, radius, 32)), 1e-300)
            updated = (c * x + math.log(max(bound, 1.0) / target)) / decay
            if updated <= radius * 1.0001:
                break
            radius = updated

    cap = math.pi / (x * math.cos(spec.psi))
    edges = _ray_panels(min(0.125, 0.125 * c) if c > 0 else 0.125, cap, radius)
    if len(edges) - 1 > cfg.max_subdivisions:
        raise ContourError(f"射线面板数 {len(edges) - 1} 超过节点预算 max_subdivisions = {cfg.max_subdivisions}")

    t_fine, w_fine = _gauss(spec.nodes)
    t_coarse, w_coarse = _gauss(spec.nodes // 2)
    fine = (_ray_sum(F, c, up, x, edges, t_fine, w_fine) - _ray_sum(F, c, down, x, edges, t_fine, w_fine)) / (2j * math.pi)
    coarse = (_ray_sum(F, c, up, x, edges, t_coarse, w_coarse)
              - _ray_sum(F, c, down, x, edges, t_coarse, w_coarse)) / (2j * math.pi)
    panels = len(edges) - 1
    evaluations = 2 * panels * (spec.nodes + spec.nodes // 2)
    error = abs(fine - coarse) + abs(fine.imag)
    logger.debug(f"射线积分: R = {radius:.3g}, {panels} 个面板, 值 {fine.real:.12g} ± {error:.2e}")
    return IntegralResult(value=fine.real, error_estimate=error, evaluations=evaluations,
                          imag_residual=abs(fine.imag))
