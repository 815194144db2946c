#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
卷积密度

通过从属函数反演求密度：

    ⊞ (ℝ):   ρ(x) = -Im G_μ(x + iε)/π，G_μ = 1/F₁(ω₁)
    ⊠ (ℝ₊):  ρ(x) = Im[z(ψ_μ(z) + 1)]/π，z = 1/(x - iε)
    ⊠ (𝕋):   ρ(θ) = Re(1 + 2ψ_μ((1 - ε)e^{-iθ}))，相对归一化弧长

每个网格点沿 ε 序列求值（用上一个 ε 的 ω₁ 热启动），相邻两次
Richardson 外推值稳定后冻结。原始值与外推值相差超过 edge_flag_jump
的点视为处在边缘附近，报告最小 ε 处的原始值并标记 edge。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..config import get_config
from ..core.measures import (
    TWO_PI,
    Domain,
    Measure,
    ac_density,
    is_haar,
    is_point_mass,
    support_components,
)
from ..utils.fs import FileSystemUtils
from ..utils.numerics import richardson
from .subordination import SubordinationConfig, solve_additive, solve_multiplicative

logger = logging.getLogger(__name__)

FLAG_OK = "ok"
FLAG_EDGE = "edge"
FLAG_NOT_CONVERGED = "not_converged"

CSV_HEADER = ["x", "density", "eps_used", "flag"]

# 外推值相对变化小于该值时冻结
SETTLE_TOL = 1e-7

# 网格端点离支撑边缘在这么多步长内时做端点幂律修正
EDGE_CELLS = 4


@dataclass
class DensityGrid:
    """网格上的密度值

    points 为实数（𝕋 上为角度），values 已裁剪为非负；
    unlocated_mass = 1 - ∫ρ，包含原子和网格外的质量。
    给出 hull（卷积支撑的凸包）时，网格端点离支撑边缘不超过
    EDGE_CELLS 个网格步长的一侧按幂律 ρ ≈ c|x - e|^β 积分最外一格，
    并补上端点到边缘之间的质量。
    """

    points: np.ndarray
    values: np.ndarray
    eps_used: np.ndarray
    flags: List[str]
    domain: Domain
    unlocated_mass: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    hull: Optional[Tuple[float, float]] = None

    @property
    def converged(self):
        return all(f != FLAG_NOT_CONVERGED for f in self.flags)

    def value_at(self, x):
        """网格上离 x 最近的点的值"""
        i = int(np.argmin(np.abs(self.points - x)))
        return float(self.values[i])

    def edge_correction(self):
        """两端幂律修正量之和（加到梯形积分上）"""
        if self.hull is None or self.domain == Domain.CIRCLE or self.points.size < 3:
            return 0.0
        if not np.all(np.diff(self.points) > 0):
            return 0.0
        x, r = self.points, self.values
        lo, hi = self.hull
        return (_edge_cell(x[0], x[1], r[0], r[1], lo)
                + _edge_cell(x[-1], x[-2], r[-1], r[-2], hi))

    def integral(self):
        if self.points.size < 2:
            return 0.0
        total = float(trapezoid(self.values, self.points))
        if self.domain == Domain.CIRCLE:
            total /= TWO_PI
        return total + self.edge_correction()

    def rows(self):
        for x, v, e, f in zip(self.points, self.values, self.eps_used, self.flags):
            yield [float(x), float(v), float(e), f]


def _edge_cell(x0, x1, r0, r1, edge):
    """最外一格 [x0, x1] 按 c|x - edge|^β 积分减去梯形值，再加上 x0 到 edge 的质量"""
    if not math.isfinite(edge):
        return 0.0
    d0, d1 = abs(x0 - edge), abs(x1 - edge)
    step = d1 - d0
    if not (r0 > 0 and r1 > 0 and d0 > 0 and step > 0 and d0 <= EDGE_CELLS * step):
        return 0.0
    beta = math.log(r1 / r0) / math.log(d1 / d0)
    if not -1.0 < beta <= 2.0:
        return 0.0
    c = r0 / d0**beta
    power = beta + 1.0
    cell = c * (d1**power - d0**power) / power
    tail = c * d0**power / power
    return cell - 0.5 * step * (r0 + r1) + tail


def _edge_jump(edge_flag_jump):
    if edge_flag_jump is not None:
        return float(edge_flag_jump)
    return float(get_config().get("density", "edge_flag_jump", 1e-3))


def _finish(points, values, eps_used, flags, domain, diagnostics=None, hull=None):
    values = np.where(values < 0.0, 0.0, values)
    grid = DensityGrid(points, values, eps_used, flags, domain, diagnostics=diagnostics or {},
                       hull=hull)
    grid.unlocated_mass = 1.0 - grid.integral()
    grid.diagnostics.setdefault("edge_correction", grid.edge_correction())
    counts = {flag: flags.count(flag) for flag in (FLAG_OK, FLAG_EDGE, FLAG_NOT_CONVERGED)}
    grid.diagnostics.setdefault("flags", counts)
    if counts[FLAG_NOT_CONVERGED]:
        logger.warning(f"{counts[FLAG_NOT_CONVERGED]} 个网格点未收敛，值已标记")
    logger.debug(f"密度网格: {points.size} 个点, 未定位质量 {grid.unlocated_mass:.6f}")
    return grid


def _schedule_density(solver, m1, m2, points, to_z, to_density, cfg, jump, domain, hull=None):
    """沿 ε 序列求密度，稳定的点逐个冻结"""
    n = points.size
    ratio = cfg.eps_ratio
    values = np.full(n, math.nan)
    raw_last = np.full(n, math.nan)
    eps_used = np.zeros(n)
    converged = np.zeros(n, dtype=bool)
    settled = np.zeros(n, dtype=bool)
    prev_raw = np.full(n, math.nan, dtype=float)
    prev_ext = np.full(n, math.nan, dtype=float)
    w0 = None

    for k, eps in enumerate(cfg.eps_schedule()):
        active = np.nonzero(~settled)[0]
        if active.size == 0:
            break
        z = to_z(points[active], eps)
        start = None if w0 is None else w0[active]
        sol = solver(m1, m2, z, cfg, w0=start)
        if w0 is None:
            w0 = np.zeros(n, dtype=complex)
        w0[active] = sol.omega1

        with np.errstate(divide="ignore", invalid="ignore"):
            raw = to_density(sol.f_value, z)
        raw_last[active] = raw
        eps_used[active] = eps
        converged[active] = sol.converged

        if k == 0:
            values[active] = raw
        else:
            ext = richardson(raw, prev_raw[active], ratio)
            values[active] = ext
            if k >= 2:
                change = np.abs(ext - prev_ext[active])
                done = (change <= SETTLE_TOL * (1.0 + np.abs(ext))) & sol.converged
                settled[active[done]] = True
            prev_ext[active] = ext
        prev_raw[active] = raw

    flags = []
    for i in range(n):
        if not converged[i] or not np.isfinite(values[i]):
            flags.append(FLAG_NOT_CONVERGED)
            if not np.isfinite(values[i]):
                values[i] = raw_last[i] if np.isfinite(raw_last[i]) else 0.0
        elif abs(raw_last[i] - values[i]) > jump:
            flags.append(FLAG_EDGE)
            values[i] = raw_last[i]
        else:
            flags.append(FLAG_OK)
    return _finish(points, values, eps_used, flags, domain, {"settled": int(settled.sum())}, hull)


def _hull(kind, m1, m2):
    """卷积支撑的凸包：⊞ 为端点之和，ℝ₊ 上 ⊠ 为端点之积"""
    (a1, b1), (a2, b2) = support_components(m1).hull(), support_components(m2).hull()
    if kind == "add":
        return a1 + a2, b1 + b2
    return max(0.0, a1 * a2), b1 * b2


def _exact(points, values, domain):
    n = points.size
    return _finish(points, np.asarray(values, dtype=float), np.zeros(n), [FLAG_OK] * n, domain,
                   {"shortcut": True})


def density_additive(m1: Measure, m2: Measure, grid, cfg: Optional[SubordinationConfig] = None,
                     edge_flag_jump: Optional[float] = None) -> DensityGrid:
    """μ₁ ⊞ μ₂ 在网格上的密度

    Args:
        m1: 实轴上的测度
        m2: 实轴上的测度
        grid: 实数网格
        cfg: 迭代与 ε 序列参数
        edge_flag_jump: 边缘判定阈值，None 时取配置

    Returns:
        DensityGrid: 密度
    """
    cfg = cfg or SubordinationConfig.from_config()
    points = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(points)):
        raise ValueError("网格点必须有限")

    if is_point_mass(m1) or is_point_mass(m2):
        point, other = (m1, m2) if is_point_mass(m1) else (m2, m1)
        return _exact(points, ac_density(other, points - point.atoms[0].position), Domain.REAL)

    return _schedule_density(
        solve_additive, m1, m2, points,
        lambda x, eps: x + 1j * eps,
        lambda f, z: -np.imag(1.0 / f) / math.pi,
        cfg, _edge_jump(edge_flag_jump), Domain.REAL, _hull("add", m1, m2),
    )


def density_mult_halfline(m1: Measure, m2: Measure, grid,
                          cfg: Optional[SubordinationConfig] = None,
                          edge_flag_jump: Optional[float] = None) -> DensityGrid:
    """ℝ₊ 上 μ₁ ⊠ μ₂ 的密度，网格点须为正"""
    cfg = cfg or SubordinationConfig.from_config()
    points = np.asarray(grid, dtype=float)
    if np.any(points <= 0) or not np.all(np.isfinite(points)):
        raise ValueError("ℝ₊ 上的密度网格必须在 (0, ∞) 内")

    if is_point_mass(m1) or is_point_mass(m2):
        point, other = (m1, m2) if is_point_mass(m1) else (m2, m1)
        c = point.atoms[0].position
        if c == 0.0:
            return _exact(points, np.zeros(points.size), Domain.HALFLINE)
        return _exact(points, ac_density(other, points / c) / c, Domain.HALFLINE)

    def to_density(eta, z):
        psi = eta / (1.0 - eta)
        return np.imag(z * (psi + 1.0)) / math.pi

    return _schedule_density(
        solve_multiplicative, m1, m2, points,
        lambda x, eps: 1.0 / (x - 1j * eps),
        to_density,
        cfg, _edge_jump(edge_flag_jump), Domain.HALFLINE, _hull("mult-r", m1, m2),
    )


def density_mult_circle(m1: Measure, m2: Measure, grid,
                        cfg: Optional[SubordinationConfig] = None,
                        edge_flag_jump: Optional[float] = None) -> DensityGrid:
    """𝕋 上 μ₁ ⊠ μ₂ 的密度（相对归一化弧长 dθ/2π），网格为角度"""
    cfg = cfg or SubordinationConfig.from_config()
    points = np.asarray(grid, dtype=float)

    if is_haar(m1) or is_haar(m2):
        return _exact(points, np.ones(points.size), Domain.CIRCLE)
    if is_point_mass(m1) or is_point_mass(m2):
        point, other = (m1, m2) if is_point_mass(m1) else (m2, m1)
        shifted = np.mod(points - point.atoms[0].position, TWO_PI)
        return _exact(points, TWO_PI * ac_density(other, shifted), Domain.CIRCLE)

    def to_density(eta, z):
        psi = eta / (1.0 - eta)
        return np.real(1.0 + 2.0 * psi)

    return _schedule_density(
        solve_multiplicative, m1, m2, points,
        lambda theta, eps: (1.0 - eps) * np.exp(-1j * theta),
        to_density,
        cfg, _edge_jump(edge_flag_jump), Domain.CIRCLE,
    )


DENSITY_SOLVERS = {
    "add": density_additive,
    "mult-r": density_mult_halfline,
    "mult-t": density_mult_circle,
}


def write_density_csv(grid: DensityGrid, file_path):
    """写出 x,density,eps_used,flag"""
    return FileSystemUtils.write_csv(file_path, CSV_HEADER, list(grid.rows()))


def read_density_csv(file_path, domain=Domain.REAL) -> DensityGrid:
    """读取 write_density_csv 写出的文件"""
    header, rows = FileSystemUtils.read_csv(file_path)
    if header != CSV_HEADER:
        raise ValueError(f"密度 CSV 表头不符: {header}")
    points = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    eps_used = np.array([float(r[2]) for r in rows])
    flags = [r[3] for r in rows]
    grid = DensityGrid(points, values, eps_used, flags, Domain(domain))
    grid.unlocated_mass = 1.0 - grid.integral()
    return grid
