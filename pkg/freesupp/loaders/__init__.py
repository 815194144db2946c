#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测度描述文件加载
"""

from .measure_loader import load_measure, measure_from_dict, measure_to_dict, save_measure

__all__ = ["load_measure", "measure_from_dict", "measure_to_dict", "save_measure"]
