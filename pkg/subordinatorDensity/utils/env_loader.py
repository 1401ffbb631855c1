#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
环境变量加载模块
用于从.env文件加载环境变量，并提供获取环境变量的工具函数
"""

import os
import logging
from pathlib import Path
from typing import Optional

# 尝试导入dotenv库
try:
    from dotenv import load_dotenv
except ImportError:
    load_dotenv = None

logger = logging.getLogger("subordinatorDensity.env_loader")

# 环境变量默认值
DEFAULTS = {
    # 配置文件位置，为空时使用项目根目录下的 config.yaml
    "SUBDENS_CONFIG": "",

    # 日志配置
    "SUBDENS_LOG_LEVEL": "INFO",
    "SUBDENS_LOG_DIR": "",

    # 数值积分容差，为空时使用 config.yaml 中的值
    "SUBDENS_ABS_TOL": "",
    "SUBDENS_REL_TOL": "",
    "SUBDENS_MAX_SUBDIVISIONS": "",
}


def project_root() -> Path:
    """返回仓库根目录（包目录的上一级）"""
    return Path(__file__).resolve().parent.parent.parent


def load_env_file(env_file: Optional[str] = None) -> bool:
    """
    加载环境变量文件

    Args:
        env_file: 环境变量文件路径，如果为None，则依次在包目录、config目录和项目根目录查找.env

    Returns:
        是否成功加载环境变量文件
    """
    if load_dotenv is None:
        logger.debug("python-dotenv 未安装，跳过 .env 加载")
        return False

    if env_file is None:
        package_dir = Path(__file__).resolve().parent.parent
        possible_env_files = [
            package_dir / ".env",
            package_dir / "config" / ".env",
            project_root() / ".env",
        ]
        env_file = next((p for p in possible_env_files if p.exists()), None)
        if env_file is None:
            logger.debug("未找到.env文件，使用默认环境变量值")
            return False

    try:
        load_dotenv(env_file)
        logger.info(f"已加载环境变量文件: {env_file}")
        return True
    except Exception as e:
        logger.error(f"加载环境变量文件时出错: {e}")
        return False


def get_env(key: str, default: Optional[str] = None) -> str:
    """
    获取环境变量值

    Args:
        key: 环境变量名称
        default: 默认值，如果未指定则使用DEFAULTS中的默认值

    Returns:
        环境变量值
    """
    if default is None and key in DEFAULTS:
        default = DEFAULTS[key]
    return os.environ.get(key, default)


def get_env_int(key: str, default: Optional[int] = None) -> Optional[int]:
    """
    获取整数类型的环境变量值，空字符串视为未设置

    Args:
        key: 环境变量名称
        default: 默认值

    Returns:
        环境变量值（整数类型）
    """
    value = get_env(key)
    if value in (None, ""):
        return default
    try:
        return int(value)
    except (ValueError, TypeError):
        logger.warning(f"环境变量 {key} 的值 '{value}' 不是有效的整数，将使用默认值 {default}")
        return default


def get_env_float(key: str, default: Optional[float] = None) -> Optional[float]:
    """
    获取浮点类型的环境变量值，空字符串视为未设置

    Args:
        key: 环境变量名称
        default: 默认值

    Returns:
        环境变量值（浮点类型）
    """
    value = get_env(key)
    if value in (None, ""):
        return default
    try:
        return float(value)
    except (ValueError, TypeError):
        logger.warning(f"环境变量 {key} 的值 '{value}' 不是有效的浮点数，将使用默认值 {default}")
        return default


def get_env_bool(key: str, default: Optional[bool] = None) -> bool:
    """
    获取布尔类型的环境变量值

    Args:
        key: 环境变量名称
        default: 默认值

    Returns:
        环境变量值（布尔类型）
    """
    value = get_env(key)
    if value in (None, ""):
        return bool(default)
    if value.lower() in ("true", "yes", "1", "t", "y"):
        return True
    if value.lower() in ("false", "no", "0", "f", "n"):
        return False
    logger.warning(f"环境变量 {key} 的值 '{value}' 不是有效的布尔值，将使用默认值 {default}")
    return bool(default)


# 初始化时自动加载环境变量
load_env_file()
