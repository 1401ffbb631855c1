#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数值配置模块
定义积分、围道、ε 阶梯、网格、反演和级数的配置模型，并从 config.yaml 与环境变量合并加载
"""

import logging
import math
import os
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..utils.env_loader import get_env, get_env_float, get_env_int, project_root

logger = logging.getLogger("subordinatorDensity.config")

SchemeKind = Literal["truncate", "exp_tilt", "smooth_cut", "power_tilt", "square_cut", "semigroup"]

# 这些方案的 u_{nε} 对 ε 解析，外推时首指数已知为 1
_ANALYTIC_KINDS = {"power_tilt", "square_cut", "semigroup"}


def default_ladder(eps0: float = 0.2, levels: int = 6) -> List[float]:
    """几何阶梯 ε_k = ε₀·2^{−k}"""
    return [eps0 * 2.0 ** (-k) for k in range(levels)]


class QuadratureConfig(BaseModel):
    """自适应积分配置"""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(1e-11, gt=0, description="绝对容差")
    rel_tol: float = Field(1e-10, gt=0, description="相对容差")
    max_subdivisions: int = Field(200, ge=1, description="QUADPACK 子区间上限，也是围道面板预算")
    origin_singularity_exponent: Optional[float] = Field(
        None, gt=-1.0, le=0.0, description="被积函数在左端点附近的行为 (x-a)^s 中的 s")
    end_singularity_exponent: Optional[float] = Field(
        None, gt=-1.0, le=0.0, description="被积函数在右端点附近的行为 (b-x)^s 中的 s")
    line_nodes: int = Field(24, ge=8, description="竖线积分每个面板的 Gauss-Legendre 节点数")
    max_half_periods: int = Field(4096, ge=16, description="竖线积分最多累积的半周期数")
    raise_on_failure: bool = Field(True, description="未收敛时抛出异常，否则只记录警告")

    def with_hints(self, origin: Optional[float] = None, end: Optional[float] = None) -> "QuadratureConfig":
        """返回带端点奇异性指数的副本"""
        return self.model_copy(update={"origin_singularity_exponent": origin, "end_singularity_exponent": end})

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


class ContourSpec(BaseModel):
    """倾斜围道参数：角点 c，半角 ψ，射线方向 ±(π/2+ψ)"""

    model_config = ConfigDict(frozen=True)

    c: float = Field(1.0, description="角点横坐标，必须大于模型的增长率")
    psi: float = Field(0.6, gt=0.0, lt=math.pi / 2, description="半角 ψ")
    truncation_radius: Optional[float] = Field(None, gt=0.0, description="射线截断半径，None 表示自动选择")
    nodes: int = Field(48, ge=16, description="每个面板的 Gauss-Legendre 节点数")

    @property
    def ray_angle(self) -> float:
        return math.pi / 2 + self.psi


class EpsilonScheme(BaseModel):
    """复合泊松近似 u_ε 的选择与外推阶梯"""

    model_config = ConfigDict(frozen=True)

    kind: SchemeKind = Field("smooth_cut", description="u_ε 的构造方式")
    ladder: List[float] = Field(default_factory=default_ladder, description="严格递减的 ε 阶梯")
    expansion_exponent: Optional[float] = Field(None, gt=0.0, description="已知的 ε 展开首指数")

    @field_validator("ladder")
    @classmethod
    def _check_ladder(cls, ladder: List[float]) -> List[float]:
        if not ladder:
            raise ValueError("ε 阶梯不能为空")
        if any(e <= 0 for e in ladder):
            raise ValueError("ε 阶梯必须全部为正")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("ε 阶梯必须严格递减")
        return ladder

    @property
    def effective_exponent(self) -> Optional[float]:
        if self.expansion_exponent is not None:
            return self.expansion_exponent
        return 1.0 if self.kind in _ANALYTIC_KINDS else None


class GridConfig(BaseModel):
    """卷积幂网格配置"""

    model_config = ConfigDict(frozen=True)

    nodes_per_panel: int = Field(16, ge=4, description="每个面板的 Chebyshev-Lobatto 节点数")
    panel_ratio: float = Field(2.0, gt=1.0, description="相邻面板端点之比")
    lower_ratio: float = Field(1e-9, gt=0.0, lt=1.0, description="网格下端相对上端的比例")
    direct_max_order: int = Field(2, ge=1, description="不超过该阶的卷积幂直接嵌套积分")


class InversionDefaults(BaseModel):
    """阻尼反演默认值"""

    model_config = ConfigDict(frozen=True)

    extra_damping: int = Field(3, ge=2, description="m = n + extra_damping")
    c: Optional[float] = Field(None, description="竖线横坐标，None 表示按鞍点自动选择")
    derivative_source: Literal["closed_form", "numeric_integral"] = Field("closed_form")


class SeriesDefaults(BaseModel):
    """时间级数默认值"""

    model_config = ConfigDict(frozen=True)

    n_max: int = Field(40, ge=1, description="级数项数上限")
    tail_tol: float = Field(1e-12, gt=0, description="连续两项小于该值即停止")
    noise_tol: float = Field(1e-6, gt=0, lt=1, description="系数被误差淹没时，项与其误差之和相对部分和低于该值即视为小量")


class OutputConfig(BaseModel):
    """输出文件配置"""

    model_config = ConfigDict(frozen=True)

    format: Literal["csv", "svg"] = Field("csv", description="主输出格式")
    svg_log_y: bool = Field(False, description="SVG 纵轴是否取对数")


class Settings(BaseModel):
    """合并后的全部数值配置"""

    model_config = ConfigDict(frozen=True)

    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    contour: ContourSpec = Field(default_factory=ContourSpec)
    epsilon: EpsilonScheme = Field(default_factory=EpsilonScheme)
    grid: GridConfig = Field(default_factory=GridConfig)
    inversion: InversionDefaults = Field(default_factory=InversionDefaults)
    series: SeriesDefaults = Field(default_factory=SeriesDefaults)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _check_consistency(self) -> "Settings":
        if self.series.tail_tol >= 1.0:
            raise ValueError("series.tail_tol 必须小于 1")
        return self


def _read_yaml(path: str) -> Dict[str, Any]:
    """读取 YAML 配置文件，文件不存在时返回空字典"""
    if not os.path.exists(path):
        logger.debug(f"配置文件不存在，使用默认值: {path}")
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"配置文件 {path} 不是有效的 YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件 {path} 的顶层必须是映射")
    return data


def _env_overrides() -> Dict[str, Any]:
    """环境变量中的积分容差覆盖项"""
    overrides: Dict[str, Any] = {}
    for key, field in (("SUBDENS_ABS_TOL", "abs_tol"), ("SUBDENS_REL_TOL", "rel_tol")):
        value = get_env_float(key)
        if value is not None:
            overrides[field] = value
    subdivisions = get_env_int("SUBDENS_MAX_SUBDIVISIONS")
    if subdivisions is not None:
        overrides["max_subdivisions"] = subdivisions
    return overrides


def load_settings(path: Optional[str] = None, overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> Settings:
    """
    加载配置：命令行覆盖项 > 环境变量 > config.yaml > 模型默认值

    Args:
        path: YAML 文件路径，None 时读取 SUBDENS_CONFIG，再回退到项目根目录的 config.yaml
        overrides: 按配置节组织的覆盖项，例如 {"quadrature": {"abs_tol": 1e-12}}

    Returns:
        校验后的 Settings

    Raises:
        ConfigError: 文件或取值无效
    """
    path = path or get_env("SUBDENS_CONFIG") or str(project_root() / "config.yaml")
    data = _read_yaml(path)

    unknown = set(data) - set(Settings.model_fields)
    if unknown:
        raise ConfigError(f"配置文件包含未知的配置节: {sorted(unknown)}")

    merged: Dict[str, Dict[str, Any]] = {name: dict(data.get(name) or {}) for name in Settings.model_fields}
    merged["quadrature"].update(_env_overrides())
    for section, values in (overrides or {}).items():
        if section not in merged:
            raise ConfigError(f"未知的配置节: {section}")
        merged[section].update({k: v for k, v in values.items() if v is not None})

    try:
        settings = Settings(**merged)
    except ValidationError as e:
        raise ConfigError(f"配置校验失败: {e}") from e
    logger.debug(f"配置已加载: {path}")
    return settings
