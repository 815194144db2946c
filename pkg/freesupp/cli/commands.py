#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI 命令实现

每个子命令读取测度描述文件，调用库函数，把结果写到 --output 或标准输出。
返回值即退出码：0 成功，2 有未收敛的点（结果照常写出并带标记）。
"""

import json
import logging
import math

import numpy as np

from ..config import Config
from ..core.measures import Domain, jacobi_approximate
from ..loaders.measure_loader import load_measure, measure_to_dict
from ..oracle.rmt import OracleConfig, compare_with_support, empirical_spectrum, write_eigenvalues_csv
from ..solvers.density import DENSITY_SOLVERS, write_density_csv
from ..solvers.subordination import (
    SubordinationConfig,
    omega_additive,
    omega_additive_boundary,
    omega_mult_circle,
    omega_mult_circle_boundary,
    omega_mult_halfline,
    omega_mult_halfline_boundary,
)
from ..solvers.support import (
    SupportConfig,
    support_additive,
    support_mult_circle,
    support_mult_halfline,
)
from ..utils.fs import FileSystemUtils
from ..utils.output import (
    OMEGA_CSV_HEADER,
    OmegaRow,
    OracleOutputFormatter,
    SupportOutputFormatter,
    read_support,
    write_omega,
    write_support,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NOT_CONVERGED = 2

SUPPORT_SOLVERS = {
    "add": support_additive,
    "mult-r": support_mult_halfline,
    "mult-t": support_mult_circle,
}

DOMAINS = {"add": Domain.REAL, "mult-r": Domain.HALFLINE, "mult-t": Domain.CIRCLE}


def parse_point(text):
    """解析求值点，接受实数或 Python 复数写法（如 0.5+1j）"""
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ValueError(f"无法解析的点: {text!r}")


class FreeSuppCLI:
    """命令行实现

    Args:
        config: Config 实例，已应用命令行覆盖项
    """

    def __init__(self, config=None):
        self.config = config or Config()
        self.support_formatter = SupportOutputFormatter()
        self.oracle_formatter = OracleOutputFormatter()

    # ------------------------------------------------------------------
    # 工具
    # ------------------------------------------------------------------

    def _sub_cfg(self):
        return SubordinationConfig.from_config(self.config)

    def _load_pair(self, kind, paths):
        m1, m2 = (load_measure(p) for p in paths)
        expected = DOMAINS[kind]
        for m, path in zip((m1, m2), paths):
            if m.domain != expected:
                raise ValueError(f"{path} 的域为 {m.domain.value}，{kind} 需要 {expected.value}")
        return m1, m2

    def _emit(self, text, output=None):
        if output:
            path = FileSystemUtils.atomic_write_text(output, text if text.endswith("\n") else text + "\n")
            logger.info(f"已写出: {path}")
        else:
            print(text.rstrip("\n"))

    # ------------------------------------------------------------------
    # 子命令
    # ------------------------------------------------------------------

    def support(self, kind, measures, output=None, output_format="text", round_trip=False):
        """计算卷积支撑

        Args:
            kind: "add"、"mult-r" 或 "mult-t"
            measures: 两个测度文件路径
            output: 输出文件，None 表示标准输出
            output_format: text / json / csv
            round_trip: 是否对每个间隙做往返检查

        Returns:
            int: 退出码
        """
        m1, m2 = self._load_pair(kind, measures)
        result = SUPPORT_SOLVERS[kind](m1, m2, SupportConfig.from_config(self.config))

        exit_code = EXIT_OK
        if round_trip and result.gaps:
            checks = result.round_trip(m1, m2, self._sub_cfg())
            failed = [c for c in checks if not c.ok]
            result.diagnostics["round_trip"] = {"checked": len(checks), "failed": len(failed)}
            if failed:
                exit_code = EXIT_NOT_CONVERGED

        if output:
            fmt = output_format if output_format in ("json", "csv") else "text"
            write_support(result, output, fmt)
            logger.info(f"已写出: {output}")
        elif output_format == "json":
            print(self.support_formatter.format_json(result))
        elif output_format == "csv":
            print(FileSystemUtils.csv_text(["lo", "hi"], self.support_formatter.csv_rows(result)), end="")
        else:
            print(self.support_formatter.format_summary(result))
        return exit_code

    def density(self, kind, measures, grid=None, points=None, output=None, output_format="csv"):
        """网格上的卷积密度

        Args:
            kind: 卷积类型
            measures: 两个测度文件路径
            grid: (lo, hi, count)
            points: 显式点列表（与 grid 二选一）
            output: 输出文件
            output_format: csv / json

        Returns:
            int: 退出码
        """
        m1, m2 = self._load_pair(kind, measures)
        xs = self._grid(grid, points)
        jump = float(self.config.get("density", "edge_flag_jump", 1e-3))
        result = DENSITY_SOLVERS[kind](m1, m2, xs, self._sub_cfg(), edge_flag_jump=jump)

        if output_format == "json":
            data = {
                "domain": result.domain.value,
                "points": result.points.tolist(),
                "values": result.values.tolist(),
                "eps_used": result.eps_used.tolist(),
                "flags": result.flags,
                "unlocated_mass": result.unlocated_mass,
            }
            self._emit(json.dumps(data, indent=2, ensure_ascii=False), output)
        elif output:
            write_density_csv(result, output)
        else:
            print(FileSystemUtils.csv_text(["x", "density", "eps_used", "flag"], result.rows()), end="")

        return EXIT_OK if result.converged else EXIT_NOT_CONVERGED

    def _grid(self, grid, points):
        if points:
            return np.array([float(p) for p in points])
        if not grid:
            raise ValueError("需要 --grid LO HI COUNT 或 --points")
        lo, hi, count = float(grid[0]), float(grid[1]), int(grid[2])
        if count < 2:
            raise ValueError(f"网格点数至少为 2: {count}")
        return np.linspace(lo, hi, count)

    def omega(self, kind, measures, points, output=None, output_format="csv"):
        """从属函数 ω₁、ω₂

        实轴（ℝ₊ 上为正实数）点求边界值；𝕋 上实数输入视为角度 θ，
        取 e^{iθ} 处的径向边界值。其余点在区域内部求值。
        """
        m1, m2 = self._load_pair(kind, measures)
        cfg = self._sub_cfg()
        rows = []
        for text in points:
            z = parse_point(text)
            if kind == "add":
                value = omega_additive_boundary(m1, m2, z.real, cfg) if z.imag == 0 \
                    else omega_additive(m1, m2, z, cfg)
            elif kind == "mult-r":
                value = omega_mult_halfline_boundary(m1, m2, z.real, cfg) \
                    if z.imag == 0 and z.real > 0 else omega_mult_halfline(m1, m2, z, cfg)
            elif z.imag == 0:
                z = complex(math.cos(z.real), math.sin(z.real))
                value = omega_mult_circle_boundary(m1, m2, z, cfg)
            else:
                value = omega_mult_circle(m1, m2, z, cfg)
            rows.append(OmegaRow(z, value.omega1, value.omega2, value.residual,
                                 value.eps_used, value.converged))

        if output:
            write_omega(rows, output, "json" if output_format == "json" else "csv")
        elif output_format == "json":
            print(json.dumps([r.to_dict() for r in rows], indent=2, ensure_ascii=False))
        else:
            table = [
                [r.x.real, r.x.imag, r.omega1.real, r.omega1.imag, r.omega2.real,
                 r.omega2.imag, r.residual, r.eps_used, int(r.converged)]
                for r in rows
            ]
            print(FileSystemUtils.csv_text(OMEGA_CSV_HEADER, table), end="")

        return EXIT_OK if all(r.converged for r in rows) else EXIT_NOT_CONVERGED

    def oracle(self, kind, measures, support_file=None, eigenvalues=None, output=None,
               output_format="text"):
        """随机矩阵对照

        Args:
            kind: 卷积类型
            measures: 两个测度文件路径
            support_file: support 命令写出的支撑文件
            eigenvalues: 特征值 CSV 导出路径
            output: 报告输出文件
            output_format: text / json
        """
        m1, m2 = self._load_pair(kind, measures)
        cfg = OracleConfig.from_config(self.config)
        spectrum = empirical_spectrum(kind, m1, m2, cfg)

        comparison = None
        if support_file:
            support = read_support(support_file, DOMAINS[kind].value)
            comparison = compare_with_support(spectrum, support, cfg.gap_threshold)
        if eigenvalues:
            write_eigenvalues_csv(spectrum, eigenvalues)

        if output_format == "json":
            self._emit(self.oracle_formatter.format_json(spectrum, comparison), output)
        else:
            self._emit(self.oracle_formatter.format_summary(spectrum, comparison), output)
        return EXIT_OK

    def approx(self, measure, eps, edge_exponent=0.5, output=None):
        """Jacobi 型逼近测度，输出测度描述 JSON"""
        m = load_measure(measure)
        approx = jacobi_approximate(m, float(eps), float(edge_exponent))
        text = json.dumps(measure_to_dict(approx), indent=2, ensure_ascii=False)
        self._emit(text, output)
        return EXIT_OK


__all__ = ["FreeSuppCLI", "EXIT_OK", "EXIT_FAILED", "EXIT_NOT_CONVERGED"]
