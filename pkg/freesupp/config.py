#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置管理

统一的配置管理系统：默认值 → JSON 文件 → 环境变量 → 命令行参数。
"""

import copy
import json
import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)


class Config:
    """配置管理类"""

    # 默认配置
    DEFAULT_CONFIG = {
        "quadrature": {
            "nodes": 200,
        },
        "subordination": {
            "tol": 1e-12,
            "max_iter": 100000,
            "eps0": 1e-2,
            "eps_ratio": 0.5,
            "eps_steps": 20,
            "damping": 1.0,
        },
        "support": {
            "grid_size": 512,
            "tol_t": 1e-9,
            "boundary_band": 1e-10,
            "workers": 1,
        },
        "density": {
            "edge_flag_jump": 1e-3,
        },
        "oracle": {
            "matrix_size": 2000,
            "trials": 20,
            "seed": 0,
            "gap_threshold": 0.05,
            "bins": 100,
            "workers": 1,
        },
        "logging": {
            "level": "WARNING",
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        },
    }

    # 环境变量 -> (配置段, 键, 类型)
    ENV_MAPPINGS = {
        "FREESUPP_QUAD_NODES": ("quadrature", "nodes", int),
        "FREESUPP_TOL": ("subordination", "tol", float),
        "FREESUPP_MAX_ITER": ("subordination", "max_iter", int),
        "FREESUPP_SEED": ("oracle", "seed", int),
        "FREESUPP_WORKERS": ("support", "workers", int),
        "FREESUPP_LOG_LEVEL": ("logging", "level", str),
    }

    def __init__(self, config_file=None):
        """初始化配置

        Args:
            config_file: 配置文件路径
        """
        self.config = copy.deepcopy(self.DEFAULT_CONFIG)

        if config_file:
            self.load_from_file(config_file)

        # 从环境变量覆盖配置
        self.load_from_env()

    def load_from_file(self, config_file):
        """从文件加载配置

        Args:
            config_file: 配置文件路径
        """
        config_path = Path(config_file)
        if not config_path.exists():
            logger.warning(f"配置文件不存在: {config_file}")
            return

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                file_config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"加载配置文件失败: {e}")
            return

        # 深度合并配置
        self._deep_merge(self.config, file_config)
        logger.info(f"加载配置文件: {config_file}")

    def load_from_env(self):
        """从环境变量加载配置"""
        for env_var, (section, key, cast) in self.ENV_MAPPINGS.items():
            value = os.environ.get(env_var)
            if not value:
                continue
            try:
                self.config[section][key] = cast(value)
                logger.info(f"环境变量配置: {env_var} = {value}")
            except ValueError as e:
                logger.warning(f"环境变量格式错误 {env_var}: {e}")

    def _deep_merge(self, base_dict, update_dict):
        """深度合并字典

        Args:
            base_dict: 基础字典
            update_dict: 更新字典
        """
        for key, value in update_dict.items():
            if (
                key in base_dict
                and isinstance(base_dict[key], dict)
                and isinstance(value, dict)
            ):
                self._deep_merge(base_dict[key], value)
            else:
                base_dict[key] = value

    def get(self, section, key=None, default=None):
        """获取配置值

        Args:
            section: 配置段
            key: 配置键，None 表示获取整个段
            default: 默认值

        Returns:
            配置值
        """
        if key is None:
            return self.config.get(section, default)
        return self.config.get(section, {}).get(key, default)

    def set(self, section, key, value):
        """设置配置值

        Args:
            section: 配置段
            key: 配置键
            value: 配置值
        """
        if section not in self.config:
            self.config[section] = {}

        self.config[section][key] = value

    def apply_overrides(self, overrides):
        """应用命令行覆盖项，值为 None 的项忽略

        Args:
            overrides: {(section, key): value}
        """
        for (section, key), value in overrides.items():
            if value is not None:
                self.set(section, key, value)

    def save_to_file(self, config_file):
        """保存配置到文件

        Args:
            config_file: 配置文件路径
        """
        config_path = Path(config_file)
        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, "w", encoding="utf-8") as f:
            json.dump(self.config, f, indent=2, ensure_ascii=False)

        logger.info(f"配置已保存: {config_file}")

    def to_dict(self):
        """转换为字典

        Returns:
            dict: 配置字典
        """
        return copy.deepcopy(self.config)


# 全局配置实例
_global_config = None


def get_config():
    """获取全局配置实例

    Returns:
        Config: 配置实例
    """
    global _global_config

    if _global_config is None:
        config_files = [
            "freesupp_config.json",
            "config/freesupp_config.json",
        ]

        config_file = None
        for file_path in config_files:
            if os.path.exists(file_path):
                config_file = file_path
                break

        _global_config = Config(config_file)

    return _global_config


def reset_config():
    """重置全局配置"""
    global _global_config
    _global_config = None
