#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
命令行入口

    python -m subordinatorDensity coeffs --model gamma --method m2,m3 --n 2 --x 1
    python -m subordinatorDensity density --model ig --method contour --x 1 --t 1
    python -m subordinatorDensity convergence --model gamma --eps-scheme truncate --n 2 --x 1
    python -m subordinatorDensity compare --model ig --x 0.5,1,2 --t 1 --out ig.csv --svg ig.svg
    python -m subordinatorDensity models

退出码：0 成功，2 配置错误，3 方法不适用，4 必需格子的数值失败
"""

import argparse
import logging
import sys
from typing import List, Optional, get_args

from pydantic import ValidationError

from ..config.settings import SchemeKind
from ..errors import ConfigError, SubordinatorDensityError
from ..utils.env_loader import get_env, load_env_file, project_root
from ..utils.unified_logging import setup_unified_logging
from .commands import COMMANDS, build_run

logger = logging.getLogger("subordinatorDensity.cli")


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=str, help="YAML 配置文件（默认 SUBDENS_CONFIG 或项目根目录的 config.yaml）")
    parent.add_argument("--env-file", type=str, help=".env 文件路径")
    parent.add_argument("--log-level", type=str, help="日志级别（默认 SUBDENS_LOG_LEVEL 或 INFO）")
    parent.add_argument("--out", type=str, help="输出文件，缺省或 '-' 时写到标准输出")
    return parent


def _numeric_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--model", type=str, default="ig", help="模型描述 name[:key=value,…]（默认 ig）")
    parent.add_argument("--method", type=str, help="逗号分隔的方法名")
    parent.add_argument("--x", type=str, default="1", help="x 网格：0.5,1,2 或 start:stop:count[:log]")
    parent.add_argument("--t", type=str, help="t 网格，语法同 --x（默认 1）")
    parent.add_argument("--n", type=str, help="系数阶数：单个 n、逗号列表或区间 a:b（含两端）")
    parent.add_argument("--eps-scheme", type=str, choices=list(get_args(SchemeKind)), help="u_ε 的构造方式")
    parent.add_argument("--eps-ladder", type=str, help="ε 阶梯：逗号列表或 eps0:levels")
    parent.add_argument("--psi", type=float, help="围道半角 ψ ∈ (0, π/2)")
    parent.add_argument("--contour-c", type=float, help="围道角点 c")
    parent.add_argument("--abs-tol", type=float, help="积分绝对容差")
    parent.add_argument("--rel-tol", type=float, help="积分相对容差")
    parent.add_argument("--n-max", type=int, help="时间级数项数上限")
    parent.add_argument("--tail-tol", type=float, help="时间级数停止阈值")
    parent.add_argument("--format", type=str, choices=["csv", "svg"], help="主输出格式")
    parent.add_argument("--svg", type=str, help="在 CSV 之外再写一张 SVG 图")
    return parent


def build_argparser() -> argparse.ArgumentParser:
    common = _common_options()
    numeric = _numeric_options()
    parser = argparse.ArgumentParser(prog="subordinatorDensity", description="从属子半群密度与时间级数系数的数值计算")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common, numeric], help="系数 uₙ(x) 表")
    sub.add_parser("density", parents=[common, numeric], help="密度 p(x; t) 表")
    sub.add_parser("convergence", parents=[common, numeric], help="复合泊松近似的 ε 阶梯研究")
    sub.add_parser("compare", parents=[common, numeric], help="多方法对照表")
    sub.add_parser("models", parents=[common], help="列出已注册模型")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    解析参数、配置日志并分发子命令

    Returns:
        退出码
    """
    parser = build_argparser()
    args = parser.parse_args(argv)

    load_env_file(args.env_file)
    log_file = setup_unified_logging(str(project_root()), level=args.log_level or get_env("SUBDENS_LOG_LEVEL"))
    if log_file:
        logger.debug(f"日志文件: {log_file}")

    try:
        run, settings = build_run(args)
        logger.info(f"执行 {run.command}: 模型 {run.model}, 方法 {run.methods or '默认'}")
        return COMMANDS[run.command](run, settings)
    except ValidationError as e:
        err: SubordinatorDensityError = ConfigError(f"配置校验失败: {e}")
    except SubordinatorDensityError as e:
        err = e
    logger.error(f"{type(err).__name__}: {err}")
    print(f"错误: {err}", file=sys.stderr)
    return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
