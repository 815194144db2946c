#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
从属函数

三种自由卷积的从属函数 ω₁、ω₂，用 Denjoy-Wolff 不动点迭代求得：

    ⊞ (ℝ):   φ_z(w) = z + h₂(z + h₁(w))，h = F - id
    ⊠ (ℝ₊):  φ_z(w) = z·k₂(z·k₁(w))，k = η/z
    ⊠ (𝕋):   同上，定义在单位圆盘

迭代对数组中的所有点同时进行，已收敛的点不再参与计算；
每步尝试一次带保护的 Newton 步，只接受落在域内且残差下降的候选点。
边界值沿 ε 序列逼近并做 Richardson 外推。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..config import get_config
from ..core.errors import (
    DegenerateInputError,
    NoLimitError,
    NotConvergedError,
    PointMassInputError,
)
from ..core.measures import Domain, Measure, is_point_mass
from ..core.transforms import discretize
from ..utils.numerics import richardson

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubordinationConfig:
    """迭代与边界外推参数"""

    tol: float = 1e-12
    max_iter: int = 100000
    eps0: float = 1e-2
    eps_ratio: float = 0.5
    eps_steps: int = 20
    damping: float = 1.0
    nodes: int = 200

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"tol 必须为正: {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter 必须 ≥ 1: {self.max_iter}")
        if not 0.0 < self.eps_ratio < 1.0:
            raise ValueError(f"eps_ratio 必须在 (0, 1) 内: {self.eps_ratio}")
        if self.eps0 <= 0 or self.eps_steps < 2:
            raise ValueError("eps0 必须为正且 eps_steps ≥ 2")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping 必须在 (0, 1] 内: {self.damping}")

    @classmethod
    def from_config(cls, config=None):
        config = config or get_config()
        section = config.get("subordination")
        return cls(
            tol=float(section["tol"]),
            max_iter=int(section["max_iter"]),
            eps0=float(section["eps0"]),
            eps_ratio=float(section["eps_ratio"]),
            eps_steps=int(section["eps_steps"]),
            damping=float(section["damping"]),
            nodes=int(config.get("quadrature", "nodes", 200)),
        )

    def eps_schedule(self):
        return self.eps0 * self.eps_ratio ** np.arange(self.eps_steps)


@dataclass
class SubordinationValue:
    """单点的从属函数值与迭代诊断"""

    omega1: complex
    omega2: complex
    f_value: complex
    residual: float
    iterations: int
    converged: bool
    eps_used: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def check(self):
        """未收敛时抛出 NotConvergedError"""
        if not self.converged:
            raise NotConvergedError(
                f"迭代未收敛: residual={self.residual:.3e}, iterations={self.iterations}",
                best=self.omega1,
                residual=self.residual,
            )
        return self


@dataclass
class BoundaryValue:
    """沿 ε 序列外推得到的边界值"""

    value: Any
    infinite: bool
    converged: bool
    eps_used: float
    steps: int


@dataclass
class Solution:
    """向量化求解结果，各字段与输入点一一对应"""

    omega1: np.ndarray
    omega2: np.ndarray
    f_value: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    contraction: np.ndarray
    exceptional: np.ndarray

    def value_at(self, i, eps_used=0.0):
        return SubordinationValue(
            omega1=complex(self.omega1[i]),
            omega2=complex(self.omega2[i]),
            f_value=complex(self.f_value[i]),
            residual=float(self.residual[i]),
            iterations=int(self.iterations[i]),
            converged=bool(self.converged[i]),
            eps_used=eps_used,
            diagnostics={
                "contraction": float(self.contraction[i]),
                "exceptional": bool(self.exceptional[i]),
            },
        )


def _iterate(phi, z, w0, cfg, dphi=None, inside=None):
    """对数组中每个点迭代 w ← (1-d)w + d·φ_z(w)，逐点判停

    给出 dphi 与 inside 时，每步先尝试 Newton 步 w - (w - φ)/(1 - φ′)：
    候选点须在域内且使 |w - φ(w)| 下降，否则退回普通迭代。
    支撑内部 |φ′| 随 ε 趋于 1，普通迭代需要 O(1/ε) 步。
    """
    z = np.asarray(z, dtype=complex)
    w = np.array(z if w0 is None else w0, dtype=complex)
    iterations = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    stalled = np.zeros(z.shape, dtype=bool)

    for _ in range(cfg.max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        wi = w[idx]
        zi = z[idx]
        image = phi(zi, wi)
        new = image
        if cfg.damping < 1.0:
            new = (1.0 - cfg.damping) * wi + cfg.damping * image

        if dphi is not None:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                gap = wi - image
                cand = wi - gap / (1.0 - dphi(zi, wi))
                ok = np.isfinite(cand) & inside(zi, cand)
                cand = np.where(ok, cand, wi)
                better = ok & (np.abs(cand - phi(zi, cand)) < np.abs(gap))
            new = np.where(better, cand, new)

        bad = ~np.isfinite(new)
        new = np.where(bad, wi, new)
        step = np.abs(new - wi)
        scale = 1.0 + np.abs(new) + np.abs(z[idx])
        w[idx] = new
        iterations[idx] += 1

        done = (step <= 0.5 * cfg.tol * scale) | bad
        stalled[idx[bad]] = True
        active[idx[done]] = False

    return w, iterations, stalled | active


# ============================================================================
# ⊞
# ============================================================================


def _two_atom(m: Measure):
    return m.domain != Domain.CIRCLE and len(m.atoms) == 2 and not m.ac_components


def _mobius_coefficients(m: Measure):
    """两原子测度的 h = F - id 是 Möbius 变换 (Aw + B)/(w - c)"""
    (a, p), (b, _) = ((x.position, x.mass) for x in m.atoms)
    c = p * b + (1.0 - p) * a
    return c - a - b, a * b, c


def mobius_fixed_point(m1: Measure, m2: Measure, z):
    """两原子⊞两原子的精确解

    φ_z 是 Möbius 变换，吸引不动点是二次方程 γw² + (δ-α)w - β = 0 的根，
    取 |φ′| 较小者；|φ′| 相同时取上半平面的根。φ_z 为恒等映射时返回 nan
    并标记 exceptional。

    Returns:
        tuple: (omega1, contraction, exceptional)
    """
    z = np.asarray(z, dtype=complex)
    A1, B1, c1 = _mobius_coefficients(m1)
    A2, B2, c2 = _mobius_coefficients(m2)

    alpha = (A2 + z) * (A1 + z) + (B2 - c2 * z)
    beta = (A2 + z) * (B1 - c1 * z) - c1 * (B2 - c2 * z)
    gamma = (A1 + z) - c2
    delta = (B1 - c1 * z) + c1 * c2
    det = alpha * delta - beta * gamma

    norm = np.abs(alpha) + np.abs(delta) + 1.0
    exceptional = (np.abs(gamma) + np.abs(beta) + np.abs(alpha - delta)) <= 1e-12 * norm

    with np.errstate(divide="ignore", invalid="ignore"):
        linear = np.abs(gamma) <= 1e-14 * norm
        g = np.where(linear, 1.0, gamma)
        root = np.sqrt((delta - alpha) ** 2 + 4.0 * gamma * beta)
        r1 = (alpha - delta + root) / (2.0 * g)
        r2 = (alpha - delta - root) / (2.0 * g)
        r_lin = beta / (delta - alpha)

        d1 = np.abs(det / (gamma * r1 + delta) ** 2)
        d2 = np.abs(det / (gamma * r2 + delta) ** 2)
        tie = np.abs(d1 - d2) <= 1e-9 * (d1 + d2)
        pick1 = np.where(tie, np.imag(r1) >= np.imag(r2), d1 < d2)
        omega = np.where(pick1, r1, r2)
        contraction = np.where(pick1, d1, d2)

        omega = np.where(linear, r_lin, omega)
        contraction = np.where(linear, np.abs(det / delta**2), contraction)

    omega = np.where(exceptional, complex(math.nan, math.nan), omega)
    return omega, contraction, exceptional


def _h_prime(disc, w):
    """h′ = F′ - 1 = -G′/G² - 1"""
    g = disc.cauchy(w)
    return -disc.cauchy_prime(w) / (g * g) - 1.0


def solve_additive(m1: Measure, m2: Measure, z, cfg: SubordinationConfig, w0=None) -> Solution:
    """⊞ 从属函数（向量化）

    Args:
        m1: 第一个测度
        m2: 第二个测度
        z: 求值点数组（上半平面）
        cfg: 迭代参数
        w0: 初始值，None 表示从 z 开始

    Returns:
        Solution: 每个点的结果
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d1 = discretize(m1, cfg.nodes)
    d2 = discretize(m2, cfg.nodes)

    def F1(w):
        return 1.0 / d1.cauchy(w)

    def F2(w):
        return 1.0 / d2.cauchy(w)

    exceptional = np.zeros(z.shape, dtype=bool)
    if _two_atom(m1) and _two_atom(m2):
        omega1, _, exceptional = mobius_fixed_point(m1, m2, z)
        iterations = np.zeros(z.shape, dtype=int)
        failed = exceptional.copy()
    else:
        def phi(zz, w):
            u = zz + F1(w) - w
            return zz + F2(u) - u

        def dphi(zz, w):
            u = zz + F1(w) - w
            return _h_prime(d2, u) * _h_prime(d1, w)

        def inside(zz, w):
            return (np.imag(zz) > 0) & (np.imag(w) > 0)

        omega1, iterations, failed = _iterate(phi, z, w0, cfg, dphi, inside)

    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = F1(omega1)
        omega2 = f1 + z - omega1
        f2 = F2(omega2)
        scale = 1.0 + np.abs(omega1) + np.abs(z)
        residual = np.maximum(np.abs(f1 - f2), np.abs(omega1 + omega2 - z - f1)) / scale

        g1, g2 = d1.cauchy(omega1), d2.cauchy(omega2)
        fp1 = -d1.cauchy_prime(omega1) / g1**2
        fp2 = -d2.cauchy_prime(omega2) / g2**2
        contraction = np.abs((fp1 - 1.0) * (fp2 - 1.0))

    residual = np.where(np.isfinite(residual), residual, math.inf)
    converged = ~failed & (residual <= cfg.tol)
    return Solution(omega1, omega2, f1, residual, iterations, converged, contraction, exceptional)


# ============================================================================
# ⊠ (ℝ₊ 与 𝕋)
# ============================================================================


def solve_multiplicative(m1: Measure, m2: Measure, z, cfg: SubordinationConfig, w0=None) -> Solution:
    """⊠ 从属函数（向量化，ℝ₊ 与 𝕋 共用）

    ω₁ 是 w ↦ z·k₂(z·k₁(w)) 的不动点，ω₂ = z·k₁(ω₁)，f_value = η₁(ω₁)。
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d1 = discretize(m1, cfg.nodes)
    d2 = discretize(m2, cfg.nodes)

    def phi(zz, w):
        return zz * d2.k(zz * d1.k(w))

    def dphi(zz, w):
        return zz * d2.k_prime(zz * d1.k(w)) * zz * d1.k_prime(w)

    if m1.domain == Domain.CIRCLE:
        def inside(zz, w):
            return (zz != 0) & (np.abs(zz) < 1.0) & (np.abs(w) < 1.0)
    else:
        def inside(zz, w):
            return (np.imag(zz) > 0) & (np.imag(w) > 0)

    omega1, iterations, failed = _iterate(phi, z, w0, cfg, dphi, inside)

    with np.errstate(divide="ignore", invalid="ignore"):
        omega2 = z * d1.k(omega1)
        eta1 = omega1 * d1.k(omega1)
        eta2 = omega2 * d2.k(omega2)
        scale = 1.0 + np.abs(omega1) + np.abs(z)
        residual = np.maximum(np.abs(eta1 - eta2), np.abs(omega1 * omega2 - z * eta1)) / scale
        contraction = np.abs(z * z * d1.k_prime(omega1) * d2.k_prime(omega2))

    zero = z == 0
    omega1 = np.where(zero, 0.0, omega1)
    omega2 = np.where(zero, 0.0, omega2)
    residual = np.where(zero, 0.0, np.where(np.isfinite(residual), residual, math.inf))
    converged = zero | (~failed & (residual <= cfg.tol))
    exceptional = np.zeros(z.shape, dtype=bool)
    return Solution(omega1, omega2, eta1, residual, iterations, converged, contraction, exceptional)


# ============================================================================
# 单点接口
# ============================================================================


def _config(cfg):
    return cfg if cfg is not None else SubordinationConfig.from_config()


def _require_nondegenerate(m1, m2, additive):
    for m in (m1, m2):
        if is_point_mass(m):
            if additive:
                raise PointMassInputError("点质量输入：⊞δ_c 是平移，请在调用方处理")
            raise DegenerateInputError("退化输入：⊠δ_c 是伸缩或旋转，请在调用方处理")


def _log_if_failed(value, name, z):
    if not value.converged:
        logger.warning(
            f"{name} 在 z={z} 处未收敛: residual={value.residual:.3e}, "
            f"iterations={value.iterations}"
        )
    return value


def omega_additive(m1: Measure, m2: Measure, z, cfg: Optional[SubordinationConfig] = None):
    """⊞ 的从属函数 ω₁(z)、ω₂(z)，z 在上半平面

    Raises:
        PointMassInputError: 输入含点质量
    """
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=True)
    z = complex(z)
    if z.imag <= 0:
        raise ValueError(f"z 必须在上半平面，边界值请用 omega_additive_boundary: {z}")
    value = solve_additive(m1, m2, [z], cfg).value_at(0)
    return _log_if_failed(value, "omega_additive", z)


def omega_mult_halfline(m1: Measure, m2: Measure, z, cfg: Optional[SubordinationConfig] = None):
    """ℝ₊ 上 ⊠ 的从属函数，z 在上半平面或负实轴上

    Raises:
        DegenerateInputError: 输入为点质量
    """
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=False)
    z = complex(z)
    if not (z.imag > 0 or (z.imag == 0 and z.real < 0)):
        raise ValueError(f"z 必须在上半平面或负实轴上: {z}")
    value = solve_multiplicative(m1, m2, [z], cfg).value_at(0)
    return _log_if_failed(value, "omega_mult_halfline", z)


def omega_mult_circle(m1: Measure, m2: Measure, z, cfg: Optional[SubordinationConfig] = None):
    """𝕋 上 ⊠ 的从属函数，|z| < 1，ω_j(0) = 0

    Raises:
        DegenerateInputError: 输入为点质量
    """
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=False)
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"z 必须在单位圆盘内，边界值请用 omega_mult_circle_boundary: {z}")
    value = solve_multiplicative(m1, m2, [z], cfg).value_at(0)
    return _log_if_failed(value, "omega_mult_circle", z)


# ============================================================================
# 边界值
# ============================================================================


def boundary_extend(f, x, cfg: Optional[SubordinationConfig] = None, domain=Domain.REAL):
    """沿 ε 序列逼近边界点 x 并外推

    实轴上求值点为 x + iε，圆上为 (1 - ε)x。相邻两次外推值相差
    小于 10·tol 时停止；|f| 超过 1/tol 或最后四步持续按 ε^{-1/4}
    以上的速度增长时标记为无穷。

    Args:
        f: 求值函数，返回复数或复数数组
        x: 边界点（实数，或单位圆上的复数）
        cfg: 迭代参数
        domain: 所在的域

    Returns:
        BoundaryValue: 外推结果

    Raises:
        NoLimitError: 沿序列振荡且不收敛
    """
    cfg = _config(cfg)
    ratio = cfg.eps_ratio
    raw, extrap, mags = [], [], []
    eps = cfg.eps0

    for k, eps in enumerate(cfg.eps_schedule()):
        point = (1.0 - eps) * x if domain == Domain.CIRCLE else x + 1j * eps
        value = np.asarray(f(point), dtype=complex)
        mag = float(np.max(np.abs(value)))
        raw.append(value)
        mags.append(mag)

        if not np.all(np.isfinite(value)) or mag > 1.0 / cfg.tol:
            return BoundaryValue(_unwrap(value), True, True, float(eps), k + 1)

        if k >= 1:
            extrap.append(richardson(value, raw[-2], ratio))
            if len(extrap) >= 2:
                diff = float(np.max(np.abs(extrap[-1] - extrap[-2])))
                if diff <= 10.0 * cfg.tol * (1.0 + float(np.max(np.abs(extrap[-1])))):
                    return BoundaryValue(_unwrap(extrap[-1]), False, True, float(eps), k + 1)

    steps = len(raw)
    growth = [mags[i] / mags[i - 1] for i in range(max(1, steps - 4), steps) if mags[i - 1] > 0]
    if len(growth) >= 4 and min(growth) >= ratio ** -0.25 and mags[-1] > 1e4:
        return BoundaryValue(_unwrap(raw[-1]), True, True, float(eps), steps)

    diffs = [float(np.max(np.abs(b - a))) for a, b in zip(extrap[:-1], extrap[1:])]
    last = extrap[-1] if extrap else raw[-1]
    size = 1.0 + float(np.max(np.abs(last)))
    if len(diffs) >= 3 and diffs[-1] >= diffs[-2] >= diffs[-3] and diffs[-1] > 1e-6 * size:
        raise NoLimitError(f"x={x} 处沿 ε 序列振荡，相邻外推值相差 {diffs[-1]:.3e}")

    return BoundaryValue(_unwrap(last), False, False, float(eps), steps)


def _unwrap(value):
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


def _boundary_value(solver, m1, m2, x, cfg, domain):
    """把向量化求解器包成 boundary_extend 的求值函数，ε 之间热启动"""
    state = {"w0": None, "last": None}

    def evaluate(point):
        sol = solver(m1, m2, [point], cfg, w0=state["w0"])
        state["w0"] = sol.omega1
        state["last"] = sol
        return np.array([sol.omega1[0], sol.omega2[0], sol.f_value[0]])

    bv = boundary_extend(evaluate, x, cfg, domain)
    last = state["last"]
    omega1, omega2, f_value = (complex(v) for v in np.atleast_1d(bv.value))
    return SubordinationValue(
        omega1=omega1,
        omega2=omega2,
        f_value=f_value,
        residual=float(last.residual[0]),
        iterations=int(last.iterations[0]),
        converged=bool(last.converged[0]) and bv.converged,
        eps_used=bv.eps_used,
        diagnostics={
            "contraction": float(last.contraction[0]),
            "exceptional": False,
            "infinite": bv.infinite,
            "steps": bv.steps,
        },
    )


def omega_additive_boundary(m1: Measure, m2: Measure, x: float,
                            cfg: Optional[SubordinationConfig] = None):
    """⊞ 从属函数在实轴上的边界值

    两原子⊞两原子时直接在实轴上解二次方程；φ_x 为恒等映射的
    例外点上改走 ε 序列外推并标记 exceptional。
    """
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=True)
    x = float(x)

    if _two_atom(m1) and _two_atom(m2):
        sol = solve_additive(m1, m2, [complex(x, 0.0)], cfg)
        if not sol.exceptional[0]:
            return sol.value_at(0)
        value = _boundary_value(solve_additive, m1, m2, x, cfg, Domain.REAL)
        value.diagnostics["exceptional"] = True
        logger.info(f"x={x} 是两原子配对的例外点，按连续性取值")
        return value

    return _log_if_failed(
        _boundary_value(solve_additive, m1, m2, x, cfg, Domain.REAL), "omega_additive_boundary", x
    )


def omega_mult_halfline_boundary(m1: Measure, m2: Measure, t: float,
                                 cfg: Optional[SubordinationConfig] = None):
    """ℝ₊ 上 ⊠ 从属函数在实数 t 处的边界值（ψ 变量）"""
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=False)
    return _log_if_failed(
        _boundary_value(solve_multiplicative, m1, m2, float(t), cfg, Domain.REAL),
        "omega_mult_halfline_boundary", t,
    )


def omega_mult_circle_boundary(m1: Measure, m2: Measure, z,
                               cfg: Optional[SubordinationConfig] = None):
    """𝕋 上 ⊠ 从属函数在单位圆上一点的径向边界值"""
    cfg = _config(cfg)
    _require_nondegenerate(m1, m2, additive=False)
    return _log_if_failed(
        _boundary_value(solve_multiplicative, m1, m2, complex(z), cfg, Domain.CIRCLE),
        "omega_mult_circle_boundary", z,
    )
