#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
工具函数

日志、文件读写、数值工具与结果格式化。
"""

from .fs import FileSystemUtils
from .logger import configure_logging, log_elapsed, setup_logger
from .numerics import bisect_monotone, gauss_jacobi, gauss_legendre, refine_root, richardson

__all__ = [
    "FileSystemUtils",
    "setup_logger",
    "configure_logging",
    "log_elapsed",
    "bisect_monotone",
    "refine_root",
    "gauss_legendre",
    "gauss_jacobi",
    "richardson",
]
