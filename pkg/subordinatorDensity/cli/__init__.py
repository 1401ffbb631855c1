#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
命令行前端
"""

from .main import build_argparser, main

__all__ = ["build_argparser", "main"]
