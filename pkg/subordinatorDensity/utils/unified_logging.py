#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
统一日志配置：先应用 logging.yaml，再把根日志器接到按日期滚动的文件和控制台。
文件路径：logs/YYYY/MM/DD/subordinator_density.log
"""

import logging
import logging.config
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

import yaml

from .logging_config import LOG_FORMAT, create_date_based_log_path, get_log_dir, resolve_level

_CONFIGURED = False


def _apply_yaml_config(project_root: str) -> None:
    """读取 logging.yaml 并交给 dictConfig，文件缺失或格式错误时只记录警告"""
    path = os.path.join(project_root, "logging.yaml")
    if not os.path.exists(path):
        return
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = yaml.safe_load(fh)
        if isinstance(config, dict):
            logging.config.dictConfig(config)
    except (yaml.YAMLError, ValueError, TypeError) as e:
        logging.getLogger("subordinatorDensity.unified_logging").warning(f"logging.yaml 无法应用: {e}")


def setup_unified_logging(
    project_root: str,
    level: Optional[str] = None,
    filename: str = "subordinator_density.log",
    log_dir: Optional[str] = None,
) -> Optional[str]:
    """
    配置根日志器，重复调用时直接返回

    Args:
        project_root: 项目根目录，用于查找 logging.yaml
        level: 日志级别字符串，None 时读取 SUBDENS_LOG_LEVEL
        filename: 日志文件名
        log_dir: 日志根目录，None 时见 get_log_dir

    Returns:
        日志文件路径；已经配置过时返回 None
    """
    global _CONFIGURED
    if _CONFIGURED:
        return None

    _apply_yaml_config(project_root)
    log_level = resolve_level(level)
    target_file, _ = create_date_based_log_path(log_dir or get_log_dir(), filename)

    root = logging.getLogger()
    root.setLevel(log_level)
    # 清空旧处理器，避免重复
    root.handlers.clear()
    fmt = logging.Formatter(LOG_FORMAT)

    try:
        file_handler = RotatingFileHandler(target_file, maxBytes=10 * 1024 * 1024, backupCount=5,
                                           encoding="utf-8")
        file_handler.setLevel(log_level)
        file_handler.setFormatter(fmt)
        root.addHandler(file_handler)
    except OSError as e:
        target_file = None
        logging.getLogger("subordinatorDensity.unified_logging").warning(f"无法写入日志文件: {e}")

    # 控制台输出走 stderr，stdout 留给 CSV
    console = logging.StreamHandler()
    console.setLevel(log_level)
    console.setFormatter(fmt)
    root.addHandler(console)

    # 包内日志器统一透传到root
    package_logger = logging.getLogger("subordinatorDensity")
    package_logger.setLevel(log_level)
    package_logger.propagate = True
    package_logger.handlers.clear()

    logging.getLogger("subordinatorDensity.unified_logging").info(
        f"Unified logging configured. File: {target_file}, Level: {logging.getLevelName(log_level)}"
    )
    _CONFIGURED = True
    return target_file


def reset_unified_logging() -> None:
    """测试用：允许重新配置"""
    global _CONFIGURED
    _CONFIGURED = False
