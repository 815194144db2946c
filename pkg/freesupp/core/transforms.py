#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
解析变换

G_μ、F_μ = 1/G_μ、ψ_μ、η_μ = ψ/(1+ψ)、k_μ = η/z 及其导数，
以及方差函数 V_μ = M₂ - M₁² 和对数 η 函数 u_μ。

测度先离散化成 (节点, 权重) + 闭式分量，之后的求值都是向量化的有限和。
导数一律解析求和，不做差分。
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..utils.numerics import refine_root
from .errors import (
    BranchUndeterminedError,
    DomainViolationError,
    EtaZeroError,
    EvalOnSupportError,
    PoleOfFError,
    PsiIsMinusOneError,
)
from .measures import (
    TWO_PI,
    Domain,
    Measure,
    Uniform,
    circular_mean,
    mean,
    support_components,
    variance,
)

logger = logging.getLogger(__name__)

DEFAULT_NODES = 200
SUPPORT_TOL = 1e-13
SMALL_Z = 1e-7


@dataclass(frozen=True)
class TransformBundle:
    """ψ、η、k、k′ 在同一点的值"""

    psi: complex
    eta: complex
    k: complex
    k_prime: complex


@dataclass(frozen=True)
class Discretization:
    """测度的离散表示

    points/weights 为原子与求积节点（圆上为单位复数），
    closed 为保留闭式变换的分量，haar 为整圆均匀分量的质量。
    """

    domain: Domain
    points: np.ndarray
    weights: np.ndarray
    closed: Tuple = ()
    haar: float = 0.0
    k0: complex = 0.0
    k0_prime: complex = 0.0
    spread_points: np.ndarray = None
    spread_weights: np.ndarray = None

    # ------------------------------------------------------------------
    # 实轴：G 与 G′
    # ------------------------------------------------------------------

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            total = np.sum(self.weights / (z[..., None] - self.points), axis=-1)
        for comp in self.closed:
            total = total + comp.weight * comp.cauchy(z)
        return total

    def cauchy_prime(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            total = -np.sum(self.weights / (z[..., None] - self.points) ** 2, axis=-1)
        for comp in self.closed:
            total = total + comp.weight * comp.cauchy_prime(z)
        return total

    def cauchy_real(self, t):
        """实轴间隙上的 G（实值）"""
        return np.real(self.cauchy(np.asarray(t, dtype=float)))

    # ------------------------------------------------------------------
    # 乘法：M₁ = ∫ 1/(1-zs)，M₂ = ∫ 1/(1-zs)²
    # ------------------------------------------------------------------

    def resolvents(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            base = 1.0 / (1.0 - z[..., None] * self.points)
            m1 = np.sum(self.weights * base, axis=-1)
            m2 = np.sum(self.weights * base * base, axis=-1)

            if self.closed:
                zero = z == 0
                zs = np.where(zero, 1.0, z)
                for comp in self.closed:
                    g = comp.cauchy(1.0 / zs)
                    gp = comp.cauchy_prime(1.0 / zs)
                    m1 = m1 + comp.weight * np.where(zero, 1.0, g / zs)
                    m2 = m2 + comp.weight * np.where(zero, 1.0, -gp / zs**2)

        if self.haar:
            inside = np.abs(z) <= 1.0
            m1 = m1 + self.haar * inside
            m2 = m2 + self.haar * inside
        return m1, m2

    def psi(self, z):
        return self.resolvents(z)[0] - 1.0

    def eta(self, z):
        m1 = self.resolvents(z)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            return (m1 - 1.0) / m1

    def k(self, z):
        """k = η/z，z = 0 附近用一阶展开"""
        z = np.asarray(z, dtype=complex)
        small = np.abs(z) < SMALL_Z
        zs = np.where(small, 1.0, z)
        m1 = self.resolvents(zs)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            value = (m1 - 1.0) / (zs * m1)
        return np.where(small, self.k0 + self.k0_prime * z, value)

    def k_prime(self, z):
        """k′ = (M₂ - M₁²) / (z² M₁²)"""
        z = np.asarray(z, dtype=complex)
        small = np.abs(z) < SMALL_Z
        zs = np.where(small, 1.0, z)
        m1, m2 = self.resolvents(zs)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = (m2 - m1 * m1) / (zs * zs * m1 * m1)
        return np.where(small, self.k0_prime, value)

    # ------------------------------------------------------------------
    # 方差：抵消严重时改用平移后的节点和
    # ------------------------------------------------------------------

    def _has_spread(self):
        return self.spread_points is not None and self.spread_points.size > 0

    def _shifted_variance(self, diff):
        w = self.spread_weights
        e1 = diff @ w
        e2 = (diff * diff) @ w
        return e2 - e1 * e1

    def gap_variance(self, t):
        """1/(t-s) 的方差 -G′ - G² = (F′ - 1)G²，t 为间隙上的实数

        远离支撑时 -G′ 与 G² 几乎相消，改用 d_i = (x_i - x̄)/((t - x_i)(t - x̄))
        的加权方差。
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        g = self.cauchy_real(t)
        gp = np.real(self.cauchy_prime(t))
        value = np.array(-gp - g * g)
        far = value < 1e-3 * np.abs(gp)
        if np.any(far) and self._has_spread():
            x = self.spread_points
            ref = float(self.spread_weights @ x)
            tf = t[far][:, None]
            value[far] = self._shifted_variance((x - ref) / ((tf - x) * (tf - ref)))
        return np.maximum(value, 0.0)

    def resolvent_variance(self, t):
        """M₂ - M₁²；ℝ₊ 上 t 为实数（返回实数），𝕋 上返回复数"""
        t = np.atleast_1d(np.asarray(t))
        m1, m2 = self.resolvents(t)
        value = m2 - m1 * m1
        if self.domain == Domain.CIRCLE:
            return value

        value = np.array(np.real(value))
        far = np.abs(value) < 1e-3 * np.abs(np.real(m2))
        if np.any(far) and self._has_spread():
            x = self.spread_points
            ref = float(self.spread_weights @ x)
            tf = np.real(t[far])[:, None]
            diff = tf * (x - ref) / ((1.0 - tf * x) * (1.0 - tf * ref))
            value[far] = self._shifted_variance(diff)
        return np.maximum(value, 0.0)


def discretize(m: Measure, nodes: int = DEFAULT_NODES) -> Discretization:
    """离散化测度（结果缓存在测度上）

    Args:
        m: 校验后的测度
        nodes: 每个求积分量的节点数

    Returns:
        Discretization: 离散表示
    """
    key = ("disc", int(nodes))
    cached = m._cache.get(key)
    if cached is not None:
        return cached

    pos, mass = m.atom_arrays()
    xs, ws, closed = [pos], [mass], []
    haar = 0.0

    if m.domain == Domain.CIRCLE:
        xs = [np.exp(1j * pos)]
        for comp in m.ac_components:
            a, b = comp.interval
            if isinstance(comp, Uniform) and comp.is_full_circle:
                haar += comp.weight
                continue
            if b - a >= TWO_PI - 1e-12:
                # 整圆上的非均匀密度用周期梯形公式
                theta = a + TWO_PI * np.arange(nodes) / nodes
                w = comp.density(theta) * TWO_PI / nodes
            else:
                theta, w = comp.nodes(nodes)
            xs.append(np.exp(1j * theta))
            ws.append(comp.weight * w)
        points = np.concatenate(xs).astype(complex)
        k0 = complex(circular_mean(m))
        second = complex(np.sum(np.concatenate(ws) * points**2))
        k0_prime = second - k0 * k0
    else:
        for comp in m.ac_components:
            if comp.closed_form:
                closed.append(comp)
                continue
            x, w = comp.nodes(nodes)
            xs.append(x)
            ws.append(comp.weight * w)
        points = np.concatenate(xs).astype(float)
        if m.is_unbounded:
            k0 = k0_prime = complex(math.nan)
        else:
            k0 = complex(mean(m))
            k0_prime = complex(variance(m))

    spread_x, spread_w = None, None
    if m.domain != Domain.CIRCLE and not m.is_unbounded:
        sx, sw = [points], [np.concatenate(ws)]
        for comp in closed:
            x, w = comp.nodes(nodes)
            sx.append(x)
            sw.append(comp.weight * w)
        spread_x = np.concatenate(sx).astype(float)
        spread_w = np.concatenate(sw).astype(float)

    disc = Discretization(
        Domain(m.domain), points, np.concatenate(ws).astype(float),
        tuple(closed), haar, k0, k0_prime, spread_x, spread_w,
    )
    m._cache[key] = disc
    return disc


def _scalar(value, like):
    if np.ndim(like) == 0:
        return complex(value)
    return value


def _check_real_axis(m: Measure, z):
    if m.domain == Domain.CIRCLE:
        raise DomainViolationError("Cauchy 变换只用于实轴或 ℝ₊ 上的测度")
    z = np.asarray(z, dtype=complex)
    on_axis = np.imag(z) == 0
    if np.any(on_axis):
        dist = support_components(m).distance(np.real(z[on_axis]))
        if np.any(dist < SUPPORT_TOL):
            raise EvalOnSupportError(f"在支撑上求值: {np.real(z[on_axis])[dist < SUPPORT_TOL]}")


def _check_multiplicative(m: Measure, z):
    z = np.asarray(z, dtype=complex)
    supp = support_components(m)
    if m.domain == Domain.CIRCLE:
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise DomainViolationError("圆上的 ψ 只在闭单位圆盘上求值")
        boundary = np.abs(np.abs(z) - 1.0) <= 1e-14
        if np.any(boundary):
            angles = np.mod(-np.angle(z[boundary]), TWO_PI)
            if np.any(supp.distance(angles) < SUPPORT_TOL):
                raise EvalOnSupportError("1/z 落在支撑上")
        return
    real = (np.imag(z) == 0) & (z != 0)
    if np.any(real):
        with np.errstate(divide="ignore"):
            inv = 1.0 / np.real(z[real])
        if np.any(supp.distance(inv) < SUPPORT_TOL):
            raise EvalOnSupportError("1/t 落在支撑上")


# ============================================================================
# 实轴变换
# ============================================================================


def cauchy_G(m: Measure, z, nodes: int = DEFAULT_NODES):
    """G_μ(z) = ∫ dμ(t)/(z - t)

    Args:
        m: ℝ 或 ℝ₊ 上的测度
        z: 求值点（标量或数组），实数点必须在支撑外
        nodes: 求积节点数

    Returns:
        G 的值

    Raises:
        EvalOnSupportError: 实数点到支撑的距离小于 1e-13
    """
    _check_real_axis(m, z)
    return _scalar(discretize(m, nodes).cauchy(z), z)


def cauchy_G_prime(m: Measure, z, nodes: int = DEFAULT_NODES):
    """G′_μ(z) = -∫ dμ(t)/(z - t)²"""
    _check_real_axis(m, z)
    return _scalar(discretize(m, nodes).cauchy_prime(z), z)


def recip_F(m: Measure, z, nodes: int = DEFAULT_NODES):
    """F_μ(z) = 1/G_μ(z)，G 为零处返回 complex('inf')"""
    g = np.asarray(cauchy_G(m, z, nodes), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(np.abs(g) == 0.0, complex(math.inf), 1.0 / np.where(g == 0, 1.0, g))
    return _scalar(f, z)


def f_prime(m: Measure, t: float, nodes: int = DEFAULT_NODES) -> float:
    """F′_μ(t) = -G′/G²，t 为支撑外的实数

    Raises:
        EvalOnSupportError: t 在支撑上
        PoleOfFError: G(t) = 0
    """
    disc = discretize(m, nodes)
    _check_real_axis(m, float(t))
    g = complex(disc.cauchy(float(t)))
    if abs(g) < 1e-15:
        raise PoleOfFError(f"G({t}) = 0，F 在此处有极点")
    return 1.0 + float(disc.gap_variance(float(t))[0]) / g.real**2


def g_zeros_on_gaps(m: Measure, nodes: int = DEFAULT_NODES):
    """G_μ 在有界间隙上的零点（每个间隙至多一个）

    G 在每个间隙上严格递减，端点附近取值异号时用 brentq 精化。

    Args:
        m: 实轴上有限分支的测度

    Returns:
        list: 零点，升序
    """
    if m.domain == Domain.CIRCLE:
        raise DomainViolationError("g_zeros_on_gaps 只用于实轴上的测度")
    disc = discretize(m, nodes)
    zeros = []
    for lo, hi in support_components(m).gaps():
        if not (math.isfinite(lo) and math.isfinite(hi)):
            continue
        delta = max(1e-12, 1e-12 * max(abs(lo), abs(hi)))
        a, b = lo + delta, hi - delta
        fa, fb = float(disc.cauchy_real(a)), float(disc.cauchy_real(b))
        if fa > 0 > fb:
            zeros.append(refine_root(lambda t: float(disc.cauchy_real(t)), a, b))
    return zeros


# ============================================================================
# 乘法变换
# ============================================================================


def moment_resolvents(m: Measure, z, nodes: int = DEFAULT_NODES):
    """(M₁, M₂) = (∫ dμ/(1-zs), ∫ dμ/(1-zs)²)"""
    _check_multiplicative(m, z)
    m1, m2 = discretize(m, nodes).resolvents(z)
    return _scalar(m1, z), _scalar(m2, z)


def psi_eta_k(m: Measure, z, nodes: int = DEFAULT_NODES) -> TransformBundle:
    """ψ、η = ψ/(1+ψ)、k = η/z、k′ = (M₂ - M₁²)/(z²(ψ+1)²)

    Args:
        m: ℝ₊ 或 𝕋 上的测度
        z: 标量求值点；ℝ₊ 上要求 1/z 不在支撑上，𝕋 上要求 |z| ≤ 1

    Returns:
        TransformBundle: 四个值

    Raises:
        EvalOnSupportError: 在支撑诱导的奇点上求值
        PsiIsMinusOneError: ψ = -1，η 有极点
    """
    if m.domain == Domain.REAL:
        raise DomainViolationError("ψ 只用于 ℝ₊ 或 𝕋 上的测度")
    _check_multiplicative(m, z)
    disc = discretize(m, nodes)
    z = complex(z)

    if z == 0:
        return TransformBundle(0j, 0j, complex(disc.k0), complex(disc.k0_prime))

    m1, m2 = (complex(v) for v in disc.resolvents(z))
    psi = m1 - 1.0
    if abs(m1) < 1e-15:
        raise PsiIsMinusOneError(f"ψ({z}) = -1")
    eta = psi / m1
    k = complex(disc.k(z))
    k_prime = complex(disc.k_prime(z))
    return TransformBundle(psi, eta, k, k_prime)


def variance_V(m: Measure, t, nodes: int = DEFAULT_NODES) -> float:
    """s ↦ 1/(1-ts) 的方差

    ℝ₊ 上 t 为实数，返回 M₂ - M₁²；𝕋 上 t 为单位圆上的复数，返回 |M₂ - M₁²|。
    """
    _check_multiplicative(m, t)
    value = discretize(m, nodes).resolvent_variance(t)[0]
    if m.domain == Domain.CIRCLE:
        return abs(complex(value))
    return float(value)


def u_log_eta(m: Measure, z, nodes: int = DEFAULT_NODES) -> complex:
    """u_μ(z) = log(η_μ(z)/z)，分支满足 0 ≤ Im u ≤ π

    实轴间隙上 ψ > 0 时 u 为实数，ψ < 0 时 Im u = π。

    Raises:
        EtaZeroError: η(z) = 0
        BranchUndeterminedError: 数值上无法满足分支约束
    """
    if m.domain != Domain.HALFLINE:
        raise DomainViolationError("u_log_eta 只用于 ℝ₊ 上的测度")
    z = complex(z)
    bundle = psi_eta_k(m, z, nodes)
    if bundle.eta == 0:
        raise EtaZeroError(f"η({z}) = 0")

    if z.imag == 0.0:
        ratio = (bundle.eta / z).real
        return complex(math.log(abs(ratio)), math.pi if ratio < 0 else 0.0)

    u = complex(np.log(bundle.eta / z))
    if u.imag < -1e-10:
        raise BranchUndeterminedError(f"Im u({z}) = {u.imag} < 0")
    return complex(u.real, max(u.imag, 0.0))


def v_log_eta(m: Measure, x, nodes: int = DEFAULT_NODES):
    """v_μ(x) = u_μ(eˣ)，只在 u 为实数的区域返回实部（向量化）"""
    if m.domain != Domain.HALFLINE:
        raise DomainViolationError("v_log_eta 只用于 ℝ₊ 上的测度")
    t = np.exp(np.asarray(x, dtype=float))
    _check_multiplicative(m, t)
    k = discretize(m, nodes).k(t)
    value = np.log(np.abs(np.real(k)))
    return float(value) if np.ndim(x) == 0 else value


def log_convexity_profile(m: Measure, x_grid, nodes: int = DEFAULT_NODES):
    """等距网格上 v_μ 的二阶中心差分

    Args:
        m: ℝ₊ 上的测度
        x_grid: 等距的 log t 网格

    Returns:
        np.ndarray: 长度为 len(x_grid) - 2 的二阶差分
    """
    values = v_log_eta(m, np.asarray(x_grid, dtype=float), nodes)
    return values[2:] - 2.0 * values[1:-1] + values[:-2]


def psi_on_circle_gap(m: Measure, theta, nodes: int = DEFAULT_NODES):
    """间隙弧上 Im ψ(e^{iθ})（实部恒为 -1/2）

    θ 满足 -θ 不在支撑上；Im ψ 在每段间隙弧上严格递减。
    """
    if m.domain != Domain.CIRCLE:
        raise DomainViolationError("psi_on_circle_gap 只用于圆上的测度")
    z = np.exp(1j * np.asarray(theta, dtype=float))
    _check_multiplicative(m, z)
    value = np.imag(discretize(m, nodes).psi(z))
    return float(value) if np.ndim(theta) == 0 else value
