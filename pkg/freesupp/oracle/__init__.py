#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
随机矩阵对照
"""

from .rmt import (
    EmpiricalSpectrum,
    OracleComparison,
    OracleConfig,
    compare_with_support,
    empirical_spectrum,
    sample_haar_unitary,
)

__all__ = [
    "EmpiricalSpectrum",
    "OracleComparison",
    "OracleConfig",
    "compare_with_support",
    "empirical_spectrum",
    "sample_haar_unitary",
]
