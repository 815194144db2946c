#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行工具
"""

from .commands import FreeSuppCLI
from .main import main

__all__ = ["FreeSuppCLI", "main"]
