#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志系统

日志一律写到标准错误：support/density/omega 把结果表格写到标准输出，
两者不能混在一起。级别与格式取自配置的 logging 段。
"""

import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _level(level):
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        return resolved if isinstance(resolved, int) else logging.INFO
    return level


def setup_logger(name="freesupp", level=logging.INFO, log_file=None, fmt=None):
    """设置日志系统

    重复调用只调整级别，不会重复添加处理器。

    Args:
        name: 日志器名称
        level: 日志级别，可以是整数或 "DEBUG" 这类名称
        log_file: 日志文件路径，None 表示只输出到标准错误
        fmt: 日志格式，None 使用默认格式

    Returns:
        logging.Logger: 日志器实例
    """
    level = _level(level)
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    formatter = logging.Formatter(fmt or DEFAULT_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def configure_logging(config, verbose=False):
    """按配置的 logging 段设置 freesupp 日志器

    Args:
        config: Config 实例
        verbose: True 时强制 DEBUG

    Returns:
        logging.Logger: freesupp 根日志器
    """
    section = config.get("logging") or {}
    level = logging.DEBUG if verbose else section.get("level", "WARNING")
    return setup_logger("freesupp", level, section.get("file"), section.get("format"))


@contextmanager
def log_elapsed(logger, label, level=logging.DEBUG):
    """记录代码块用时；产出的字典在退出时写入 seconds"""
    record = {}
    start = time.perf_counter()
    try:
        yield record
    finally:
        record["seconds"] = time.perf_counter() - start
        logger.log(level, f"{label} 用时 {record['seconds']:.3f}s")
