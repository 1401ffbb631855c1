#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
工具模块：环境变量加载与日志配置
"""

from .env_loader import get_env, get_env_bool, get_env_float, get_env_int, load_env_file, project_root
from .logging_config import create_date_based_log_path, setup_logging
from .unified_logging import setup_unified_logging

__all__ = [
    "get_env",
    "get_env_bool",
    "get_env_float",
    "get_env_int",
    "load_env_file",
    "project_root",
    "create_date_based_log_path",
    "setup_logging",
    "setup_unified_logging",
]
