#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
子命令实现：coeffs、density、convergence、compare、models

每个命令接收 RunConfig 与 Settings，写出结果并返回退出码。
"""

import dataclasses
import logging
import sys
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..analysis.series import (
    COEFFICIENT_METHODS,
    DENSITY_METHODS,
    ComparisonRow,
    build_coefficient_table,
    build_density_rows,
    compare_methods,
    unsupported_reason,
)
from ..config.settings import Settings, default_ladder, load_settings
from ..errors import CapabilityError, ConfigError
from ..methods.cp_approx import u_n_extrapolated
from ..models.base import SubordinatorModel
from ..models.families import list_models, parse_model_spec
from .writers import Curves, write_csv, write_svg

logger = logging.getLogger("subordinatorDensity.cli.commands")

EXIT_OK = 0
EXIT_NUMERICAL = 4

Command = Literal["coeffs", "density", "convergence", "compare", "models"]

_DEFAULT_METHODS: Dict[str, List[str]] = {
    "coeffs": ["m2"],
    "density": ["bromwich", "contour"],
    "convergence": ["m1"],
}


def parse_grid(text: str, name: str = "x") -> List[float]:
    """
    解析网格：逗号列表 "0.5,1,2"，或 "start:stop:count[:log]"

    Raises:
        ConfigError: 语法错误或网格为空
    """
    text = (text or "").strip()
    if not text:
        raise ConfigError(f"--{name} 不能为空")
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "linear")):
                raise ConfigError(f"--{name} 的区间语法为 start:stop:count[:log]，收到 '{text}'")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ConfigError(f"--{name} 的点数必须 ≥ 1")
            if len(parts) == 4 and parts[3] == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"--{name} 的对数网格端点必须为正")
                return [float(v) for v in np.geomspace(start, stop, count)]
            return [float(v) for v in np.linspace(start, stop, count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"--{name} 无法解析: '{text}' ({e})") from e


def parse_orders(text: Optional[str], default: Sequence[int]) -> List[int]:
    """系数阶数：单个 n 就是该阶，逗号列表原样使用，a:b 表示 a..b（含两端），可以混用如 "1:3,5" """
    if text is None:
        return list(default)
    values: List[int] = []
    try:
        for part in (p.strip() for p in text.split(",")):
            if not part:
                continue
            if ":" in part:
                lo, hi = (int(v) for v in part.split(":"))
                if hi < lo:
                    raise ConfigError(f"--n 的区间 {part} 上端小于下端")
                values.extend(range(lo, hi + 1))
            else:
                values.append(int(part))
    except ValueError as e:
        raise ConfigError(f"--n 无法解析: '{text}'") from e
    if not values or any(v < 1 for v in values):
        raise ConfigError(f"--n 必须是正整数，收到 '{text}'")
    return values


def parse_ladder(text: str) -> List[float]:
    """ε 阶梯：逗号列表，或 "eps0:levels" 表示 ε₀·2^{−k}"""
    try:
        if ":" in text:
            eps0, levels = text.split(":")
            return default_ladder(float(eps0), int(levels))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"--eps-ladder 无法解析: '{text}'") from e


class RunConfig(BaseModel):
    """一次命令行运行的参数"""

    command: Command
    model: str = Field("ig", description="模型描述 name[:key=value,…]")
    methods: List[str] = Field(default_factory=list)
    x_grid: List[float] = Field(default_factory=lambda: [1.0])
    t_grid: List[float] = Field(default_factory=lambda: [1.0])
    orders: List[int] = Field(default_factory=lambda: [1, 2, 3])
    out: Optional[str] = None
    format: Literal["csv", "svg"] = "csv"
    svg: Optional[str] = None
    log_y: bool = False

    @field_validator("x_grid")
    @classmethod
    def _check_x(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("x 网格不能为空")
        if any(x <= 0 for x in grid):
            raise ValueError("x 网格必须全部为正")
        return grid

    @field_validator("t_grid")
    @classmethod
    def _check_t(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("t 网格不能为空")
        return grid

    @field_validator("methods")
    @classmethod
    def _check_methods(cls, methods: List[str]) -> List[str]:
        known = set(COEFFICIENT_METHODS) | set(DENSITY_METHODS)
        unknown = [m for m in methods if m not in known]
        if unknown:
            raise ValueError(f"未知方法 {unknown}，可用方法: {', '.join(sorted(known))}")
        return methods


def build_run(args: Any) -> Tuple[RunConfig, Settings]:
    """
    由 argparse 结果构造 RunConfig 与 Settings（命令行 > 环境变量 > config.yaml > 默认值）

    Raises:
        ConfigError: 任何参数或配置无效
    """
    command = args.command
    overrides: Dict[str, Dict[str, Any]] = {
        "quadrature": {"abs_tol": getattr(args, "abs_tol", None), "rel_tol": getattr(args, "rel_tol", None)},
        "contour": {"psi": getattr(args, "psi", None), "c": getattr(args, "contour_c", None)},
        "epsilon": {"kind": getattr(args, "eps_scheme", None)},
        "series": {"n_max": getattr(args, "n_max", None), "tail_tol": getattr(args, "tail_tol", None)},
        "output": {"format": getattr(args, "format", None)},
    }
    if getattr(args, "eps_ladder", None):
        overrides["epsilon"]["ladder"] = parse_ladder(args.eps_ladder)
    settings = load_settings(getattr(args, "config", None), overrides)

    if command == "models":
        return RunConfig(command=command, out=getattr(args, "out", None)), settings

    methods_text = getattr(args, "method", None)
    methods = [m.strip() for m in methods_text.split(",") if m.strip()] if methods_text else \
        list(_DEFAULT_METHODS.get(command, []))
    default_orders = [2] if command == "convergence" else [1, 2, 3]
    try:
        run = RunConfig(
            command=command,
            model=args.model,
            methods=methods,
            x_grid=parse_grid(args.x, "x"),
            t_grid=parse_grid(args.t, "t") if getattr(args, "t", None) else [1.0],
            orders=parse_orders(getattr(args, "n", None), default_orders),
            out=args.out,
            format=settings.output.format,
            svg=getattr(args, "svg", None),
            log_y=settings.output.svg_log_y,
        )
    except ValidationError as e:
        raise ConfigError(f"命令行参数无效: {e}") from e
    if run.format == "svg" and run.out in (None, "-"):
        raise ConfigError("--format svg 需要同时给出 --out 文件路径")
    return run, settings


def load_model(run: RunConfig, settings: Settings) -> SubordinatorModel:
    """解析模型描述，并让模型使用合并后的积分配置"""
    model = parse_model_spec(run.model)
    return dataclasses.replace(model, quadrature=settings.quadrature)


def _emit(run: RunConfig, header: Sequence[str], rows: List[Sequence[Any]], curves: Curves,
          xlabel: str, ylabel: str, title: str, log_x: bool = False) -> None:
    if run.format == "svg":
        write_svg(run.out, curves, xlabel, ylabel, title, log_x=log_x, log_y=run.log_y)
    else:
        write_csv(run.out, header, rows)
    if run.svg:
        write_svg(run.svg, curves, xlabel, ylabel, title, log_x=log_x, log_y=run.log_y)


def _check_kind(methods: Sequence[str], allowed: Sequence[str], command: str) -> None:
    wrong = [m for m in methods if m not in allowed]
    if wrong:
        raise ConfigError(f"{command} 不接受方法 {wrong}，可用: {', '.join(allowed)}")


def _require(model: SubordinatorModel, methods: Sequence[str], settings: Settings) -> None:
    for m in methods:
        reason = unsupported_reason(model, m, settings.epsilon)
        if reason is not None:
            raise CapabilityError(f"方法 {m} 不适用于模型 {model.label}: {reason}")


def cmd_coeffs(run: RunConfig, settings: Settings) -> int:
    """uₙ(x) 表：列 x, n, method, value, error_estimate, diagnostic"""
    _check_kind(run.methods, COEFFICIENT_METHODS, "coeffs")
    model = load_model(run, settings)
    _require(model, run.methods, settings)
    table = build_coefficient_table(model, run.x_grid, run.orders, run.methods, settings)
    rows = [(r.x, r.n, r.method, r.value, r.error_estimate, r.diagnostic) for r in table.rows]
    curves: Curves = {}
    for r in table.rows:
        xs, ys = curves.setdefault(f"{r.method} n={r.n}", ([], []))
        xs.append(r.x)
        ys.append(r.value)
    _emit(run, ("x", "n", "method", "value", "error_estimate", "diagnostic"), rows, curves,
          "x", "u_n(x)", model.label)
    failed = sum(r.value is None for r in table.rows)
    logger.info(f"coeffs 完成: {model.label}, {len(rows)} 行, 失败 {failed}")
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_density(run: RunConfig, settings: Settings) -> int:
    """p(x; t) 表：列 x, t, method, value, error_estimate, diagnostic"""
    _check_kind(run.methods, DENSITY_METHODS, "density")
    model = load_model(run, settings)
    density = build_density_rows(model, run.x_grid, run.t_grid, run.methods, settings)
    rows = [(r.x, r.order, r.method, r.value, r.error_estimate, r.diagnostic) for r in density]
    _emit(run, ("x", "t", "method", "value", "error_estimate", "diagnostic"), rows, _density_curves(density),
          "x", "p(x; t)", model.label)
    failed = sum(r.value is None for r in density)
    logger.info(f"density 完成: {model.label}, {len(rows)} 行, 失败 {failed}")
    return EXIT_NUMERICAL if failed else EXIT_OK


def _density_curves(rows: Sequence[ComparisonRow]) -> Curves:
    curves: Curves = {}
    for r in rows:
        if r.quantity != "p":
            continue
        xs, ys = curves.setdefault(f"{r.method} t={r.order:g}", ([], []))
        xs.append(r.x)
        ys.append(r.value)
    return curves


def cmd_convergence(run: RunConfig, settings: Settings) -> int:
    """
    ε 阶梯研究：列 eps, n, x, u_n_eps, cancellation_condition_number, error_estimate；
    每个 (n, x) 末尾追加 eps = 0 的外推行
    """
    _check_kind(run.methods, ("m1",), "convergence")
    model = load_model(run, settings)
    _require(model, ["m1"], settings)
    scheme = settings.epsilon
    rows: List[Sequence[Any]] = []
    curves: Curves = {}
    flagged = False
    for x in run.x_grid:
        for n in run.orders:
            ladder = u_n_extrapolated(model, scheme, n, x, settings.grid)
            for s in ladder.samples:
                rows.append((s.eps, n, x, s.value, s.condition_number, s.error_estimate))
            rows.append((0.0, n, x, ladder.value, max(ladder.condition_numbers), ladder.error_estimate))
            curves[f"n={n} x={x:g}"] = ([s.eps for s in ladder.samples], [s.value for s in ladder.samples])
            flagged = flagged or ladder.extrapolation.flagged
            logger.info(f"{model.label} u_{n}({x:g}) 外推 = {ladder.value:.12g} ± {ladder.error_estimate:.2e}, "
                        f"条件数 {['%.3e' % c for c in ladder.condition_numbers]}")
    _emit(run, ("eps", "n", "x", "u_n_eps", "cancellation_condition_number", "error_estimate"), rows, curves,
          "eps", "u_n,eps(x)", f"{model.label} ({scheme.kind})", log_x=True)
    if flagged:
        logger.warning("至少一条 ε 序列不规则，外推值退回为最后一个样本")
    return EXIT_OK


def cmd_compare(run: RunConfig, settings: Settings) -> int:
    """多方法对照：列 quantity, order, x, method, value, error_estimate, diagnostic，每个格子后接汇总行"""
    model = load_model(run, settings)
    report = compare_methods(model, run.x_grid, run.t_grid, settings, orders=run.orders,
                             methods=run.methods or None)
    rows = [(r.quantity, r.order, r.x, r.method, r.value, r.error_estimate, r.diagnostic)
            for r in report.to_rows()]
    _emit(run, ("quantity", "order", "x", "method", "value", "error_estimate", "diagnostic"), rows,
          _density_curves(report.rows), "x", "p(x; t)", model.label)
    logger.info(f"compare 完成: {model.label}, 最大两两偏差 {report.max_pairwise_deviation()}, "
                f"参照偏差 {report.oracle_deviation()}, 失败格子 {len(report.failures)}")
    return EXIT_OK


def cmd_models(run: RunConfig, settings: Settings) -> int:
    """以 YAML 列出已注册模型及其参数"""
    text = yaml.safe_dump(list_models(), allow_unicode=True, sort_keys=False)
    if run.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(run.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


COMMANDS = {
    "coeffs": cmd_coeffs,
    "density": cmd_density,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "models": cmd_models,
}
