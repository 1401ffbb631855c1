#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
日志配置模块
为脚本和测试提供独立的命名日志记录器，日志文件按 年/月/日 目录存放
"""

import os
import logging
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import Optional, Tuple

from .env_loader import get_env, project_root

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

LEVEL_MAPPING = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def get_log_dir() -> str:
    """
    获取日志目录路径

    优先使用环境变量 SUBDENS_LOG_DIR，否则使用项目根目录下的 logs 目录
    """
    configured = get_env("SUBDENS_LOG_DIR")
    if configured:
        return configured
    return str(project_root() / "logs")


def resolve_level(level: Optional[object] = None) -> int:
    """
    把字符串或整数形式的日志级别统一转换为 logging 常量

    Args:
        level: None 时读取 SUBDENS_LOG_LEVEL
    """
    if isinstance(level, int):
        return level
    level_str = (level or get_env("SUBDENS_LOG_LEVEL", "INFO")).upper()
    return LEVEL_MAPPING.get(level_str, logging.INFO)


def create_date_based_log_path(base_dir: str, filename: str) -> Tuple[str, str]:
    """
    创建基于日期的日志文件路径（年/月/日结构）

    Args:
        base_dir: 基础日志目录
        filename: 日志文件名（不包含路径）

    Returns:
        tuple: (full_path, relative_path)
    """
    now = datetime.now()
    year = str(now.year)
    month = f"{now.month:02d}"
    day = f"{now.day:02d}"

    date_dir = os.path.join(base_dir, year, month, day)
    try:
        os.makedirs(date_dir, exist_ok=True)
    except OSError as e:
        logging.getLogger("subordinatorDensity.logging").warning(f"无法创建日志目录 {date_dir}: {e}")
        date_dir = base_dir

    full_path = os.path.join(date_dir, filename)
    relative_path = os.path.join(year, month, day, filename)
    return full_path, relative_path


def setup_logging(name: str = "subordinator_density", level: Optional[object] = None,
                  log_dir: Optional[str] = None) -> logging.Logger:
    """
    设置日志配置

    Args:
        name: 日志记录器名称，同时作为日志文件名
        level: 日志级别，如果为None，则从环境变量SUBDENS_LOG_LEVEL获取
        log_dir: 日志根目录，默认见 get_log_dir

    Returns:
        配置好的日志记录器
    """
    log_level = resolve_level(level)
    base_dir = log_dir or get_log_dir()
    log_file, relative_path = create_date_based_log_path(base_dir, f"{name}.log")

    logger = logging.getLogger(name)
    logger.setLevel(log_level)
    logger.handlers.clear()
    formatter = logging.Formatter(LOG_FORMAT)

    # 滚动日志文件，最大10MB，最多保留5个备份
    try:
        file_handler = RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024, backupCount=5,
                                           encoding="utf-8")
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"无法创建日志文件处理器: {e}")

    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    logger.debug(f"Log file created: {relative_path}")
    return logger
