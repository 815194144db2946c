#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
结果输出格式化器

支撑、从属函数和随机矩阵对照结果的文本/JSON/CSV 输出，
以及对应的读取函数（CLI 写出的每种文件都能读回）。
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..core.measures import SupportSet
from .fs import FileSystemUtils

SUPPORT_CSV_HEADER = ["lo", "hi"]
OMEGA_CSV_HEADER = [
    "x_re", "x_im", "omega1_re", "omega1_im", "omega2_re", "omega2_im",
    "residual", "eps_used", "converged",
]


@dataclass
class OmegaRow:
    """单点的从属函数值"""

    x: complex
    omega1: complex
    omega2: complex
    residual: float
    eps_used: float
    converged: bool

    def to_dict(self):
        return {
            "x": [self.x.real, self.x.imag],
            "omega1": [self.omega1.real, self.omega1.imag],
            "omega2": [self.omega2.real, self.omega2.imag],
            "residual": self.residual,
            "eps_used": self.eps_used,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            complex(*data["x"]),
            complex(*data["omega1"]),
            complex(*data["omega2"]),
            float(data["residual"]),
            float(data["eps_used"]),
            bool(data["converged"]),
        )


def _fmt(x):
    return f"{x:.6f}"


class SupportOutputFormatter:
    """支撑结果格式化器"""

    def format_summary(self, result) -> str:
        """格式化支撑摘要

        Args:
            result: SupportResult

        Returns:
            str: 每个分支一行，外加分支数与上界检查
        """
        support = result.support
        lines = [f"kind: {result.kind}"]
        for lo, hi in support.pieces():
            lines.append(f"[{_fmt(lo)}, {_fmt(hi)}]")
        lines.append(f"components: {support.component_count()}")

        d = result.diagnostics
        if result.kind == "add" and "bound" in d:
            status = "ok" if d.get("bound_satisfied", True) else "VIOLATED"
            lines.append(f"bound: {d['n']} <= {d['bound']} ({status})")
        elif result.kind == "mult-t" and "e_bound" in d:
            lines.append(f"e_components: {d['e_components']} (n1*n2 = {d['e_bound']})")
        return "\n".join(lines)

    def format_verbose(self, result) -> str:
        lines = [self.format_summary(result), "", "gaps:"]
        for gap in result.gaps:
            lo, hi = gap.interval
            lines.append(f"  ({_fmt(lo)}, {_fmt(hi)})")
        lines.append("diagnostics:")
        for key, value in sorted(result.diagnostics.items()):
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)

    def format_json(self, result) -> str:
        return json.dumps(result.to_dict(), indent=2, ensure_ascii=False)

    def csv_rows(self, result) -> List[List[float]]:
        return [[lo, hi] for lo, hi in result.support.pieces()]


class OracleOutputFormatter:
    """随机矩阵对照格式化器"""

    def report(self, spectrum, comparison=None) -> Dict[str, Any]:
        data = {"spectrum": spectrum.summary()}
        if comparison is not None:
            data["comparison"] = comparison.to_dict()
        return data

    def format_summary(self, spectrum, comparison=None) -> str:
        s = spectrum.summary()
        lines = [
            f"kind: {s['kind']}",
            f"samples: {s['samples']}",
            f"range: [{_fmt(s['min'])}, {_fmt(s['max'])}]",
            f"mean: {_fmt(s['mean'])}",
            f"estimated components: {s['estimated_support']['components']}",
        ]
        for lo, hi in spectrum.estimated_support.pieces():
            lines.append(f"  [{_fmt(lo)}, {_fmt(hi)}]")
        if comparison is not None:
            lines.append(f"max_deviation: {_fmt(comparison.max_deviation)}")
            lines.append(f"uncovered: {len(comparison.uncovered)}")
            lines.append(f"agrees: {comparison.agrees}")
        return "\n".join(lines)

    def format_json(self, spectrum, comparison=None) -> str:
        return json.dumps(self.report(spectrum, comparison), indent=2, ensure_ascii=False)


# ============================================================================
# 读写
# ============================================================================


def write_support(result, file_path, fmt="json"):
    """写出支撑：json 为完整结果，csv 为 lo,hi 行，text 为摘要"""
    formatter = SupportOutputFormatter()
    if fmt == "csv":
        return FileSystemUtils.write_csv(file_path, SUPPORT_CSV_HEADER, formatter.csv_rows(result))
    if fmt == "text":
        return FileSystemUtils.atomic_write_text(file_path, formatter.format_summary(result) + "\n")
    return FileSystemUtils.atomic_write_text(file_path, formatter.format_json(result) + "\n")


def read_support(file_path, domain: Optional[str] = None) -> SupportSet:
    """读取 write_support 写出的 JSON 或 CSV

    CSV 中 lo == hi 的行是孤立点；CSV 不带域信息，用 domain 指定。
    """
    path = Path(file_path)
    if path.suffix.lower() == ".csv":
        header, rows = FileSystemUtils.read_csv(path)
        if header != SUPPORT_CSV_HEADER:
            raise ValueError(f"支撑 CSV 表头不符: {header}")
        intervals, points = [], []
        for lo, hi in ((float(r[0]), float(r[1])) for r in rows):
            if lo == hi:
                points.append(lo)
            else:
                intervals.append([lo, hi])
        data = {"intervals": intervals, "isolated_points": points, "domain": domain or "real"}
        return SupportSet.from_dict(data)

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if domain is not None:
        data["domain"] = domain
    return SupportSet.from_dict(data)


def write_omega(rows: List[OmegaRow], file_path, fmt="csv"):
    if fmt == "json":
        return FileSystemUtils.write_json(file_path, [row.to_dict() for row in rows])
    table = [
        [r.x.real, r.x.imag, r.omega1.real, r.omega1.imag, r.omega2.real, r.omega2.imag,
         r.residual, r.eps_used, int(r.converged)]
        for r in rows
    ]
    return FileSystemUtils.write_csv(file_path, OMEGA_CSV_HEADER, table)


def read_omega(file_path) -> List[OmegaRow]:
    path = Path(file_path)
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as f:
            return [OmegaRow.from_dict(d) for d in json.load(f)]

    header, rows = FileSystemUtils.read_csv(path)
    if header != OMEGA_CSV_HEADER:
        raise ValueError(f"从属函数 CSV 表头不符: {header}")
    out = []
    for r in rows:
        v = [float(c) for c in r[:8]]
        out.append(OmegaRow(complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5]),
                            v[6], v[7], bool(int(r[8]))))
    return out
