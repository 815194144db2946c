#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
自由卷积的支撑与密度

ℝ 上的自由加法卷积、ℝ₊ 与 𝕋 上的自由乘法卷积：
用配对曲线判据求卷积支撑，用从属函数求密度，
并提供 Haar 共轭随机矩阵作为独立对照。

Usage:
    from freesupp import load_measure, support_additive

    m = load_measure("bern.json")
    result = support_additive(m, m)
    print(result.support.intervals)   # ((-2.0, 2.0),)
"""

__version__ = "1.0.0"
__license__ = "MIT"

import logging

from .core.errors import FreeSuppError
from .core.measures import Domain, Measure, SupportSet, jacobi_approximate, validate
from .loaders.measure_loader import load_measure, measure_from_dict, save_measure
from .oracle.rmt import OracleConfig, compare_with_support, empirical_spectrum
from .solvers.density import density_additive, density_mult_circle, density_mult_halfline
from .solvers.subordination import (
    SubordinationConfig,
    omega_additive,
    omega_mult_circle,
    omega_mult_halfline,
)
from .solvers.support import (
    SupportConfig,
    support_additive,
    support_mult_circle,
    support_mult_halfline,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "Domain",
    "Measure",
    "SupportSet",
    "validate",
    "jacobi_approximate",
    "load_measure",
    "measure_from_dict",
    "save_measure",
    "SubordinationConfig",
    "omega_additive",
    "omega_mult_halfline",
    "omega_mult_circle",
    "SupportConfig",
    "support_additive",
    "support_mult_halfline",
    "support_mult_circle",
    "density_additive",
    "density_mult_halfline",
    "density_mult_circle",
    "OracleConfig",
    "empirical_spectrum",
    "compare_with_support",
    "FreeSuppError",
    "__version__",
]
