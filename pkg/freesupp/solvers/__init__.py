#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
求解器：从属函数、卷积支撑与密度
"""

from .density import DensityGrid, density_additive, density_mult_circle, density_mult_halfline
from .subordination import SubordinationConfig, SubordinationValue
from .support import SupportConfig, SupportResult, component_count_check

__all__ = [
    "DensityGrid",
    "density_additive",
    "density_mult_halfline",
    "density_mult_circle",
    "SubordinationConfig",
    "SubordinationValue",
    "SupportConfig",
    "SupportResult",
    "component_count_check",
]
