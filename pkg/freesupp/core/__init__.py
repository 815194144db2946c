#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
核心：测度、解析变换与异常
"""

from .errors import FreeSuppError, MeasureError, SubordinationError, TransformError
from .measures import Atom, Domain, Measure, SupportSet, support_components, validate
from .transforms import cauchy_G, discretize, psi_eta_k

__all__ = [
    "Atom",
    "Domain",
    "Measure",
    "SupportSet",
    "support_components",
    "validate",
    "cauchy_G",
    "discretize",
    "psi_eta_k",
    "FreeSuppError",
    "MeasureError",
    "TransformError",
    "SubordinationError",
]
