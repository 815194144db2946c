#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
卷积支撑

支撑的补集与配对曲线之间存在同胚：

    ⊞ (ℝ):   G₁(t₁) = G₂(t₂) = g ≠ 0，(F₁′(t₁)-1)(F₂′(t₂)-1) < 1，
             间隙点 t = t₁ + t₂ - 1/g
    ⊠ (ℝ₊):  ψ₁(t₁) = ψ₂(t₂) = p ∉ {0, -1}，V₁V₂/[p(p+1)]² < 1，
             间隙点 1/t = p / ((1+p)·t₁t₂)
    ⊠ (𝕋):   ψ₁ = ψ₂ = -1/2 + iy，V₁V₂/(1/4 + y²)² < 1，
             间隙点 conj(t₁t₂/η₁)

每条曲线按公共匹配值参数化（G、ψ 或 Im ψ 在每个间隙分量上严格单调），
两端用二分反演得到 t₁、t₂，判据变号处用 brentq 精化。
曲线端点处的极限按分量端点类型给出：两侧都是原子时得到原子之和（积），
一侧趋于无穷、另一侧落在零点时得到卷积变换的零点，此点两侧的间隙合并。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config import get_config
from ..core.errors import CriterionFailedError, PoleOfFError
from ..core.measures import (
    TWO_PI,
    Domain,
    Measure,
    SupportSet,
    is_haar,
    is_point_mass,
    merge_pieces,
    support_components,
)
from ..core.transforms import cauchy_G, discretize, f_prime
from ..utils.logger import log_elapsed
from ..utils.numerics import bisect_monotone, refine_root
from .subordination import (
    SubordinationConfig,
    omega_additive_boundary,
    omega_mult_circle_boundary,
    omega_mult_halfline_boundary,
)

logger = logging.getLogger(__name__)


class Branch(str, Enum):
    """间隙分量上匹配函数的取值类别"""

    NEGATIVE = "negative"
    POSITIVE = "positive"
    PSI_POSITIVE = "psi>0"
    PSI_MIDDLE = "-1<psi<0"
    PSI_BELOW = "psi<-1"
    ARC = "arc"


class EndKind(str, Enum):
    """间隙分量端点的类型"""

    EDGE = "edge"
    ATOM = "atom"
    ZERO = "zero"
    MINUS_ONE = "minus_one"
    UNBOUNDED = "unbounded"
    ORIGIN = "origin"


@dataclass(frozen=True)
class SupportConfig:
    """曲线追踪参数"""

    grid_size: int = 512
    tol_t: float = 1e-9
    boundary_band: float = 1e-10
    workers: int = 1
    nodes: int = 200

    def __post_init__(self):
        if self.grid_size < 16:
            raise ValueError(f"grid_size 至少为 16: {self.grid_size}")
        if self.tol_t <= 0 or self.boundary_band < 0:
            raise ValueError("tol_t 必须为正，boundary_band 不能为负")
        if self.workers < 1:
            raise ValueError(f"workers 至少为 1: {self.workers}")

    @classmethod
    def from_config(cls, config=None):
        config = config or get_config()
        section = config.get("support")
        return cls(
            grid_size=int(section["grid_size"]),
            tol_t=float(section["tol_t"]),
            boundary_band=float(section["boundary_band"]),
            workers=int(section["workers"]),
            nodes=int(config.get("quadrature", "nodes", 200)),
        )


@dataclass(frozen=True)
class GapComponent:
    """单个测度的间隙分量，匹配函数在其上严格单调

    values 与 ends 分别是左右端点处匹配函数的极限值和端点类型，
    区间端点即端点坐标（可以是 ±∞）。
    """

    interval: Tuple[float, float]
    f_sign: Branch
    parent: int
    values: Tuple[float, float]
    ends: Tuple[EndKind, EndKind]
    monotone: bool = True

    @property
    def vmin(self):
        return min(self.values)

    @property
    def vmax(self):
        return max(self.values)

    def end_at(self, v):
        """匹配值 v 恰为某端点的极限值时返回 (类型, 坐标)，否则 None"""
        for value, kind, coord in zip(self.values, self.ends, self.interval):
            if value == v:
                return kind, coord
        return None


@dataclass
class PairCurve:
    """两个间隙分量之间的配对曲线

    samples 保存参数网格上的 (v, t₁, t₂, 判据) 表，
    segments 为判据为负的参数区间。
    """

    comp1: GapComponent
    comp2: GapComponent
    param_interval: Tuple[float, float]
    samples: Dict[str, np.ndarray]
    segments: List[Tuple[float, float]] = field(default_factory=list)
    mode: Any = field(default=None, repr=False, compare=False)

    @property
    def t1_range(self):
        t1 = self.samples["t1"]
        return (float(np.min(t1)), float(np.max(t1)))

    def t2_of_t1(self, t1):
        """沿曲线由 t₁ 求 t₂：先求匹配值，再在 comp2 上二分反演"""
        v = self.mode.match(1, np.atleast_1d(np.asarray(t1, dtype=float)))
        t2 = self.mode.invert(self.comp2, v)
        return float(t2[0]) if np.ndim(t1) == 0 else t2

    def criterion(self, v):
        """参数 v 处的判据值（负值表示配对属于 B/D 集合）"""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        t1 = self.mode.invert(self.comp1, v)
        t2 = self.mode.invert(self.comp2, v)
        return self.mode.criterion(v, t1, t2)


@dataclass
class GapWitness:
    """卷积支撑的一个间隙及产生它的曲线段"""

    interval: Tuple[float, float]
    curve_index: int
    segment: Tuple[float, float]
    zero_type: Tuple[bool, bool] = (False, False)


@dataclass
class RoundTripCheck:
    """间隙点经边界从属函数往返的结果"""

    point: float
    t1: complex
    t2: complex
    criterion: float
    error: float
    ok: bool


@dataclass
class SupportResult:
    """支撑计算结果"""

    kind: str
    support: SupportSet
    gaps: List[GapWitness] = field(default_factory=list)
    curves: List[PairCurve] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def bound_satisfied(self):
        return component_count_check(self)

    def round_trip(self, m1: Measure, m2: Measure, cfg: Optional[SubordinationConfig] = None,
                   tol: float = 1e-6) -> List[RoundTripCheck]:
        """在每个间隙内部取点，经边界 ω 回到配对曲线再映射回来"""
        cfg = cfg or SubordinationConfig.from_config()
        checks = []
        for gap in self.gaps:
            for point in _interior_points(gap.interval, self.kind):
                checks.append(_round_trip_point(self.kind, m1, m2, point, cfg, tol))
        return checks

    def to_dict(self):
        data = self.support.to_dict()
        data.update({
            "kind": self.kind,
            "gaps": [list(g.interval) for g in self.gaps],
            "diagnostics": _plain(self.diagnostics),
        })
        return data


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


# ============================================================================
# 参数网格
# ============================================================================


def value_grid(v_lo, v_hi, size):
    """匹配值区间 (v_lo, v_hi) 内的采样点，两端加密

    有限区间用 Chebyshev 点；半无穷与无穷区间用 tan 压缩。
    每个有限端点附加 48 个相对距离 1e-12 到 1e-2 的对数点，
    无穷端附加 48 个 1e2 到 1e12 的对数点。
    """
    s = (np.arange(size) + 0.5) / size
    extra = np.logspace(-12, -2, 48)
    far = np.logspace(2, 12, 48)
    lo_inf, hi_inf = math.isinf(v_lo), math.isinf(v_hi)

    if not lo_inf and not hi_inf:
        width = v_hi - v_lo
        grid = v_lo + width * 0.5 * (1.0 - np.cos(math.pi * s))
        pieces = [grid, v_lo + width * extra, v_hi - width * extra]
    elif lo_inf and hi_inf:
        grid = np.tan(math.pi * (s - 0.5))
        pieces = [grid, -far, far]
    elif hi_inf:
        grid = v_lo + np.tan(0.5 * math.pi * s)
        pieces = [grid, v_lo + extra, v_lo + far]
    else:
        grid = v_hi - np.tan(0.5 * math.pi * s)
        pieces = [grid, v_hi - extra, v_hi - far]

    values = np.unique(np.concatenate(pieces))
    return values[(values > v_lo) & (values < v_hi)]


# ============================================================================
# 三种卷积的曲线模式
# ============================================================================


class _Mode:
    """一种卷积的匹配函数、判据与间隙点映射"""

    kind = ""
    increasing = True
    domain = Domain.REAL

    def __init__(self, m1, m2, cfg: SupportConfig):
        self.measures = (m1, m2)
        self.discs = (discretize(m1, cfg.nodes), discretize(m2, cfg.nodes))
        self.supports = (support_components(m1), support_components(m2))
        self.cfg = cfg

    def match(self, j, t):
        raise NotImplementedError

    def components(self, j):
        raise NotImplementedError

    def bracket(self, comp, v):
        lo, hi = comp.interval
        return np.full(v.shape, lo), np.full(v.shape, hi)

    def invert(self, comp, v):
        v = np.asarray(v, dtype=float)
        lo, hi = self.bracket(comp, v)
        j = comp.parent
        return bisect_monotone(lambda t: self.match(j, t), v, lo, hi, self.increasing)

    def criterion(self, v, t1, t2):
        raise NotImplementedError

    def factor_error(self, j, t):
        """判据第 j 个因子的相对舍入误差估计"""
        return np.zeros(np.shape(t))

    def criterion_error(self, v, t1, t2, crit):
        """判据的绝对误差估计：(判据 + 1) 乘以两个因子的相对误差之和"""
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            rel = self.factor_error(1, t1) + self.factor_error(2, t2)
            return CRITERION_SAFETY * np.abs(crit + 1.0) * rel

    def image(self, v, t1, t2):
        raise NotImplementedError

    def image_loss(self, v, t1, t2, images):
        """间隙点因相消损失的相对精度"""
        return np.zeros(np.shape(images))

    def limit(self, v, end1, end2):
        return None

    def coordinates(self, comp, v):
        """匹配值 v 对应的坐标，端点值直接取端点坐标"""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty(v.shape)
        inner = np.ones(v.shape, dtype=bool)
        for i, value in enumerate(v):
            end = comp.end_at(value)
            if end is not None:
                out[i] = end[1]
                inner[i] = False
        if np.any(inner):
            out[inner] = self.invert(comp, v[inner])
        return out

    def end_value(self, j, x, inward, atom):
        """匹配函数在端点 x 处（从 inward 方向）的极限值"""
        raise NotImplementedError

    def check_monotone(self, comp):
        lo, hi = comp.interval
        lo_f = lo if math.isfinite(lo) else hi - 10.0 * (1.0 + abs(hi))
        hi_f = hi if math.isfinite(hi) else lo + 10.0 * (1.0 + abs(lo))
        u = 0.5 * (1.0 - np.cos(math.pi * (np.arange(64) + 0.5) / 64))
        values = self.match(comp.parent, lo_f + (hi_f - lo_f) * u)
        steps = np.diff(values)
        slack = 1e-12 * (1.0 + np.max(np.abs(values[np.isfinite(values)]), initial=0.0))
        if self.increasing:
            return bool(np.all(steps >= -slack))
        return bool(np.all(steps <= slack))


_EPS = float(np.finfo(float).eps)

# 误差估计的放大系数与间隙点允许的相对精度损失
CRITERION_SAFETY = 8.0
IMAGE_LOSS = 1e-8


def _atoms(m):
    return {a.position for a in m.atoms}


def _inner(x, scale=1.0):
    return 1e-12 * max(1.0, abs(x)) * scale


class _AdditiveMode(_Mode):
    """⊞：匹配 G，在每个间隙分量上递减"""

    kind = "add"
    increasing = False

    def match(self, j, t):
        return self.discs[j - 1].cauchy_real(t)

    def end_value(self, j, x, inward, atom):
        if atom:
            return math.inf if inward > 0 else -math.inf
        return float(self.match(j, x + inward * _inner(x)))

    def components(self, j):
        m = self.measures[j - 1]
        atoms = _atoms(m)
        out = []
        for lo, hi in support_components(m).gaps():
            if math.isinf(lo) and math.isinf(hi):
                continue
            if math.isinf(lo):
                vr = self.end_value(j, hi, -1, hi in atoms)
                out.append(GapComponent((lo, hi), Branch.NEGATIVE, j, (-0.0, vr),
                                        (EndKind.UNBOUNDED, _kind(hi, atoms))))
                continue
            if math.isinf(hi):
                vl = self.end_value(j, lo, 1, lo in atoms)
                out.append(GapComponent((lo, hi), Branch.POSITIVE, j, (vl, 0.0),
                                        (_kind(lo, atoms), EndKind.UNBOUNDED)))
                continue

            vl = self.end_value(j, lo, 1, lo in atoms)
            vr = self.end_value(j, hi, -1, hi in atoms)
            if vl > 0 > vr:
                fn = lambda t: float(self.match(j, t))  # noqa: E731
                zero = refine_root(fn, lo + _inner(lo), hi - _inner(hi))
                out.append(GapComponent((lo, zero), Branch.POSITIVE, j, (vl, 0.0),
                                        (_kind(lo, atoms), EndKind.ZERO)))
                out.append(GapComponent((zero, hi), Branch.NEGATIVE, j, (-0.0, vr),
                                        (EndKind.ZERO, _kind(hi, atoms))))
            elif vr >= 0:
                out.append(GapComponent((lo, hi), Branch.POSITIVE, j, (vl, vr),
                                        (_kind(lo, atoms), _kind(hi, atoms))))
            else:
                out.append(GapComponent((lo, hi), Branch.NEGATIVE, j, (vl, vr),
                                        (_kind(lo, atoms), _kind(hi, atoms))))
        return out

    def bracket(self, comp, v):
        lo, hi = comp.interval
        mag = np.abs(v)
        if math.isinf(lo):
            lo_arr = hi - (1.0 + 1e-9) / mag - _inner(hi)
            return lo_arr, np.full(v.shape, hi)
        if math.isinf(hi):
            hi_arr = lo + (1.0 + 1e-9) / mag + _inner(lo)
            return np.full(v.shape, lo), hi_arr
        return np.full(v.shape, lo), np.full(v.shape, hi)

    def criterion(self, v, t1, t2):
        # 各自用本测度在自身坐标处的 G 值，避免反演误差进入分母
        g1, g2 = self.match(1, t1), self.match(2, t2)
        var1 = self.discs[0].gap_variance(t1)
        var2 = self.discs[1].gap_variance(t2)
        with np.errstate(over="ignore", invalid="ignore"):
            return (var1 / g1**2) * (var2 / g2**2) - 1.0

    def factor_error(self, j, t):
        # 求和各项的绝对值之和不超过 1/dist(t, supp)；t 本身只精确到 4 ulp
        t = np.atleast_1d(np.asarray(t, dtype=float))
        d = self.discs[j - 1]
        g = np.abs(d.cauchy_real(t))
        gp = np.abs(np.real(d.cauchy_prime(t)))
        dist = self.supports[j - 1].distance(t)
        return 2.0 * (_EPS / (dist * g) + 4.0 * _EPS * np.abs(t) * gp / g)

    def image(self, v, t1, t2):
        with np.errstate(divide="ignore"):
            return t1 + t2 - 1.0 / v

    def image_loss(self, v, t1, t2, images):
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.abs(t1) + np.abs(t2) + np.abs(1.0 / v)
            return _EPS * terms / np.maximum(np.abs(images), 1.0)

    def limit(self, v, end1, end2):
        if end1 is None or end2 is None:
            return None
        (k1, c1), (k2, c2) = end1, end2
        if v == 0:
            if k1 == EndKind.UNBOUNDED and k2 == EndKind.UNBOUNDED:
                return c1 + c2, False
            if k1 == EndKind.ZERO and k2 == EndKind.UNBOUNDED:
                return c1 + self.discs[1].k0.real, True
            if k1 == EndKind.UNBOUNDED and k2 == EndKind.ZERO:
                return c2 + self.discs[0].k0.real, True
            return None
        if math.isinf(v) and k1 == EndKind.ATOM and k2 == EndKind.ATOM:
            return c1 + c2, False
        return None


class _HalflineMode(_Mode):
    """⊠ (ℝ₊)：匹配 ψ，在每个分量上递增；间隙点在谱变量 s = 1/t 中给出"""

    kind = "mult-r"
    increasing = True
    domain = Domain.HALFLINE

    def match(self, j, t):
        return np.real(self.discs[j - 1].psi(np.asarray(t, dtype=float)))

    def end_value(self, j, x, inward, atom):
        if atom:
            return math.inf if inward < 0 else -math.inf
        return float(self.match(j, x + inward * _inner(x)))

    def inverse_mean(self, j):
        d = self.discs[j - 1]
        with np.errstate(divide="ignore"):
            return float(np.sum(d.spread_weights / d.spread_points))

    def _split(self, j, lo, hi, vl, vr, kl, kr):
        """按 ψ = -1 与 ψ = 0 切分递增分量"""
        levels = [(-1.0, EndKind.MINUS_ONE), (0.0, EndKind.ZERO)]
        cuts = []
        for level, kind in levels:
            if vl < level < vr:
                a = lo + _inner(lo)
                b = hi - _inner(hi) if math.isfinite(hi) else 2.0 * max(lo, 1.0)
                while not math.isfinite(hi) and float(self.match(j, b)) < level and b < 1e15:
                    b *= 2.0
                fn = lambda t, lv=level: float(self.match(j, t)) - lv  # noqa: E731
                cuts.append((refine_root(fn, a, b), level, kind))

        bounds = [(lo, vl, kl)] + cuts + [(hi, vr, kr)]
        out = []
        for (a, va, ka), (b, vb, kb) in zip(bounds[:-1], bounds[1:]):
            if min(va, vb) >= 0.0:
                branch = Branch.PSI_POSITIVE
            elif max(va, vb) <= -1.0:
                branch = Branch.PSI_BELOW
            else:
                branch = Branch.PSI_MIDDLE
            out.append(GapComponent((a, b), branch, j, (va, vb), (ka, kb)))
        return out

    def components(self, j):
        m = self.measures[j - 1]
        atoms = _atoms(m)
        mass0 = sum(a.mass for a in m.atoms if a.position == 0.0)
        pieces = support_components(m).pieces()
        a_min, b_max = pieces[0][0], pieces[-1][1]
        out = []

        if math.isfinite(b_max) and b_max > 0:
            t_hi = 1.0 / b_max
            vr = self.end_value(j, t_hi, -1, b_max in atoms)
            out.append(GapComponent((0.0, t_hi), Branch.PSI_POSITIVE, j, (0.0, vr),
                                    (EndKind.ORIGIN, _kind(b_max, atoms))))

        for (_, b), (a, _) in zip(pieces[:-1], pieces[1:]):
            lo = 1.0 / a
            vl = self.end_value(j, lo, 1, a in atoms)
            if b == 0.0:
                hi, vr, kr = math.inf, -1.0 + mass0, EndKind.UNBOUNDED
            else:
                hi = 1.0 / b
                vr, kr = self.end_value(j, hi, -1, b in atoms), _kind(b, atoms)
            out.extend(self._split(j, lo, hi, vl, vr, _kind(a, atoms), kr))

        if a_min > 0:
            lo = 1.0 / a_min
            vl = self.end_value(j, lo, 1, a_min in atoms)
            out.append(GapComponent((lo, math.inf), Branch.PSI_BELOW, j, (vl, -1.0),
                                    (_kind(a_min, atoms), EndKind.UNBOUNDED)))
        return [c for c in out if c.vmin < c.vmax]

    def bracket(self, comp, v):
        lo, hi = comp.interval
        if math.isinf(hi):
            v_inf = comp.values[1]
            gap = np.maximum(v_inf - v, 1e-300)
            return np.full(v.shape, lo), (1.0 + 1.0 / gap) * lo * (1.0 + 1e-9)
        return np.full(v.shape, lo), np.full(v.shape, hi)

    def criterion(self, v, t1, t2):
        var1 = self.discs[0].resolvent_variance(t1)
        var2 = self.discs[1].resolvent_variance(t2)
        with np.errstate(over="ignore", invalid="ignore"):
            p1, p2 = self.match(1, t1), self.match(2, t2)
            return (var1 / np.abs(p1 * (p1 + 1.0))) * (var2 / np.abs(p2 * (p2 + 1.0))) - 1.0

    def factor_error(self, j, t):
        # ψ = M₁ - 1 与 ψ + 1 的相消；Σ w/|1-tx| ≤ 1/(t·dist(1/t, supp))，ψ′ = (M₂ - M₁)/t
        t = np.atleast_1d(np.asarray(t, dtype=float))
        m1, m2 = self.discs[j - 1].resolvents(t)
        m1, m2 = np.real(m1), np.real(m2)
        spread = 1.0 / (t * self.supports[j - 1].distance(1.0 / t))
        noise = _EPS * (spread + 1.0) + 4.0 * _EPS * np.abs(m2 - m1)
        return 2.0 * (noise / np.abs(m1 - 1.0) + noise / np.abs(m1))

    def image(self, v, t1, t2):
        with np.errstate(divide="ignore", invalid="ignore"):
            return v / ((1.0 + v) * t1 * t2)

    def image_loss(self, v, t1, t2, images):
        with np.errstate(divide="ignore", invalid="ignore"):
            return _EPS * (4.0 + np.abs(v / (1.0 + v)))

    def limit(self, v, end1, end2):
        if end1 is None or end2 is None:
            return None
        (k1, c1), (k2, c2) = end1, end2
        if v == 0:
            if k1 == EndKind.ORIGIN and k2 == EndKind.ORIGIN:
                return math.inf, False
            if k1 == EndKind.ORIGIN and k2 == EndKind.ZERO:
                return self.discs[0].k0.real / c2, True
            if k1 == EndKind.ZERO and k2 == EndKind.ORIGIN:
                return self.discs[1].k0.real / c1, True
            return None
        if v == -1.0:
            if k1 == EndKind.UNBOUNDED and k2 == EndKind.UNBOUNDED:
                return 0.0, False
            if k1 == EndKind.UNBOUNDED and k2 == EndKind.MINUS_ONE:
                return 1.0 / (c2 * self.inverse_mean(1)), True
            if k1 == EndKind.MINUS_ONE and k2 == EndKind.UNBOUNDED:
                return 1.0 / (c1 * self.inverse_mean(2)), True
            return None
        if math.isinf(v) and k1 == EndKind.ATOM and k2 == EndKind.ATOM:
            return 1.0 / (c1 * c2), False
        return None


class _CircleMode(_Mode):
    """⊠ (𝕋)：匹配 Im ψ(e^{iθ})，在每段间隙弧上递减；间隙点为谱角度"""

    kind = "mult-t"
    increasing = False
    domain = Domain.CIRCLE

    def match(self, j, theta):
        z = np.exp(1j * np.asarray(theta, dtype=float))
        return np.imag(self.discs[j - 1].psi(z))

    def end_value(self, j, x, inward, atom):
        if atom:
            return math.inf if inward > 0 else -math.inf
        return float(self.match(j, x + inward * _inner(x)))

    def components(self, j):
        m = self.measures[j - 1]
        atoms = np.mod(np.array(sorted(_atoms(m)), dtype=float), TWO_PI)

        def at_atom(angle):
            if atoms.size == 0:
                return False
            d = np.abs(np.mod(angle - atoms + math.pi, TWO_PI) - math.pi)
            return bool(np.min(d) < 1e-12)

        out = []
        for a, b in support_components(m).gaps():
            lo, hi = -b, -a
            vl = self.end_value(j, lo, 1, at_atom(b))
            vr = self.end_value(j, hi, -1, at_atom(a))
            kl = EndKind.ATOM if at_atom(b) else EndKind.EDGE
            kr = EndKind.ATOM if at_atom(a) else EndKind.EDGE
            comp = GapComponent((lo, hi), Branch.ARC, j, (vl, vr), (kl, kr))
            out.append(comp)
        return out

    def variance(self, j, theta):
        return np.abs(self.discs[j - 1].resolvent_variance(np.exp(1j * theta)))

    def criterion(self, v, t1, t2):
        with np.errstate(over="ignore", invalid="ignore"):
            y1, y2 = self.match(1, t1), self.match(2, t2)
            return (self.variance(1, t1) / (0.25 + y1 * y1)) * (self.variance(2, t2) / (0.25 + y2 * y2)) - 1.0

    def factor_error(self, j, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        m1, m2 = self.discs[j - 1].resolvents(np.exp(1j * theta))
        y = np.imag(m1)
        dist = self.supports[j - 1].distance(np.mod(-theta, TWO_PI))
        spread = 1.0 / (2.0 * np.sin(0.5 * np.minimum(dist, math.pi)))
        step = 4.0 * _EPS * np.maximum(1.0, np.abs(theta))
        noise = _EPS * (spread + 1.0) + step * np.abs(m2 - m1)
        return 4.0 * np.abs(y) * noise / (0.25 + y * y)

    def image(self, v, t1, t2):
        psi = -0.5 + 1j * np.asarray(v, dtype=float)
        arg_eta = np.angle(psi) - np.angle(1.0 + psi)
        return -(t1 + t2 - arg_eta)

    def image_loss(self, v, t1, t2, images):
        terms = np.abs(t1) + np.abs(t2) + math.pi
        return _EPS * terms / np.maximum(np.abs(images), 1.0)

    def limit(self, v, end1, end2):
        if end1 is None or end2 is None:
            return None
        (k1, c1), (k2, c2) = end1, end2
        if math.isinf(v) and k1 == EndKind.ATOM and k2 == EndKind.ATOM:
            return -(c1 + c2), False
        return None


def _kind(x, atoms):
    return EndKind.ATOM if x in atoms else EndKind.EDGE


MODES = {"add": _AdditiveMode, "mult-r": _HalflineMode, "mult-t": _CircleMode}


# ============================================================================
# 曲线追踪
# ============================================================================


@dataclass
class _Segment:
    lo: float
    hi: float
    lo_zero: bool
    hi_zero: bool
    params: Tuple[float, float]
    curve: int = -1


def _end_image(mode, comp1, comp2, v_end):
    """曲线端点的间隙点；极限不可用且相消过重时返回 (None, False)"""
    limit = mode.limit(v_end, comp1.end_at(v_end), comp2.end_at(v_end))
    if limit is not None:
        return limit
    if math.isfinite(v_end) and v_end != 0:
        arr = np.array([v_end])
        t1 = mode.coordinates(comp1, v_end)
        t2 = mode.coordinates(comp2, v_end)
        image = mode.image(arr, t1, t2)
        value = float(image[0])
        if math.isinf(value):
            return value, False
        if not math.isnan(value) and mode.image_loss(arr, t1, t2, image)[0] <= IMAGE_LOSS:
            return value, False
    return None, False


def _classify(crit, err, band):
    """判据可判定为负的样本

    误差估计盖过判据本身的样本无法判定，取参数网格上最近的可判定样本的结果。
    """
    finite = np.isfinite(crit)
    with np.errstate(invalid="ignore"):
        reliable = np.isfinite(err) & ((err <= band) | (np.abs(crit) > err))
        negative = finite & reliable & (crit < -np.maximum(err, band))
    undetermined = finite & ~reliable
    if not np.any(undetermined):
        return negative

    known = np.nonzero(~undetermined)[0]
    idx = np.nonzero(undetermined)[0]
    if known.size == 0:
        negative[idx] = False
        return negative
    pos = np.searchsorted(known, idx)
    left = known[np.maximum(pos - 1, 0)]
    right = known[np.minimum(pos, known.size - 1)]
    nearest = np.where(np.abs(idx - left) <= np.abs(right - idx), left, right)
    negative[idx] = negative[nearest]
    return negative


def _refined_end(mode, comp1, comp2, v_in, v_out, c_out, cfg):
    """在 v_in（判据为负）与 v_out 之间定位判据零点"""
    if not (np.isfinite(c_out) and c_out > cfg.boundary_band):
        return v_out

    def fn(v):
        arr = np.array([v])
        t1 = mode.invert(comp1, arr)
        t2 = mode.invert(comp2, arr)
        return float(mode.criterion(arr, t1, t2)[0])

    scale = max(1.0, abs(v_in), abs(v_out))
    try:
        return refine_root(fn, v_in, v_out, xtol=1e-3 * cfg.tol_t * scale)
    except ValueError:
        return v_out


def trace_pair(mode: _Mode, comp1: GapComponent, comp2: GapComponent,
               cfg: SupportConfig) -> Optional[Tuple[PairCurve, List[_Segment]]]:
    """追踪一条配对曲线并返回判据为负的段

    Returns:
        (PairCurve, 段列表)；两个分量的匹配值区间不相交时返回 None
    """
    v_lo = max(comp1.vmin, comp2.vmin)
    v_hi = min(comp1.vmax, comp2.vmax)
    if not v_lo < v_hi:
        return None

    v = value_grid(v_lo, v_hi, cfg.grid_size)
    if v.size == 0:
        return None
    t1 = mode.invert(comp1, v)
    t2 = mode.invert(comp2, v)
    crit = mode.criterion(v, t1, t2)
    err = mode.criterion_error(v, t1, t2, crit)
    images = mode.image(v, t1, t2)
    with np.errstate(invalid="ignore"):
        trusted = np.isfinite(images) & (mode.image_loss(v, t1, t2, images) <= IMAGE_LOSS)

    curve = PairCurve(comp1, comp2, (v_lo, v_hi),
                      {"v": v, "t1": t1, "t2": t2, "criterion": crit, "error": err}, mode=mode)

    negative = _classify(crit, err, cfg.boundary_band)
    segments = []
    idx = np.nonzero(negative)[0]
    if idx.size == 0:
        return curve, segments

    runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
    last = v.size - 1
    for run in runs:
        i0, i1 = int(run[0]), int(run[-1])

        if i0 == 0:
            p_lo = v_lo
        else:
            p_lo = _refined_end(mode, comp1, comp2, v[i0], v[i0 - 1], crit[i0 - 1], cfg)
        if i1 == last:
            p_hi = v_hi
        else:
            p_hi = _refined_end(mode, comp1, comp2, v[i1], v[i1 + 1], crit[i1 + 1], cfg)
        img_lo, zero_lo = _end_image(mode, comp1, comp2, p_lo)
        img_hi, zero_hi = _end_image(mode, comp1, comp2, p_hi)

        # 相消过重的端点退到段内最近的可信样本
        inner = np.arange(i0, i1 + 1)[trusted[i0:i1 + 1]]
        if inner.size == 0 and (img_lo is None or img_hi is None):
            logger.debug(f"段 ({p_lo:.6g}, {p_hi:.6g}) 的间隙点无法可靠计算，跳过")
            continue
        if img_lo is None:
            img_lo, zero_lo = float(images[inner[0]]), False
        if img_hi is None:
            img_hi, zero_hi = float(images[inner[-1]]), False

        curve.segments.append((float(p_lo), float(p_hi)))

        if mode.domain == Domain.CIRCLE:
            trace = np.unwrap(np.concatenate([[img_lo], images[inner], [img_hi]]))
            lo, hi = float(np.min(trace)), float(np.max(trace))
            segments.append(_Segment(lo, hi, False, False, (float(p_lo), float(p_hi))))
        elif img_lo <= img_hi:
            segments.append(_Segment(img_lo, img_hi, zero_lo, zero_hi, (float(p_lo), float(p_hi))))
        else:
            segments.append(_Segment(img_hi, img_lo, zero_hi, zero_lo, (float(p_lo), float(p_hi))))

    return curve, segments


def _pairs(comps1, comps2):
    return [
        (c1, c2) for c1 in comps1 for c2 in comps2
        if c1.f_sign == c2.f_sign and max(c1.vmin, c2.vmin) < min(c1.vmax, c2.vmax)
    ]


def _trace_all(mode, pairs, cfg):
    with log_elapsed(logger, f"追踪 {len(pairs)} 条配对曲线"):
        if cfg.workers > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(lambda p: trace_pair(mode, p[0], p[1], cfg), pairs))
        else:
            results = [trace_pair(mode, c1, c2, cfg) for c1, c2 in pairs]

    curves, segments = [], []
    for result in results:
        if result is None:
            continue
        curve, segs = result
        for seg in segs:
            seg.curve = len(curves)
        curves.append(curve)
        segments.extend(segs)
    return curves, segments


# ============================================================================
# 装配
# ============================================================================


def _same_point(a, b):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= 1e-7 * (1.0 + abs(a))


def _drop_slivers(segments: List[_Segment], tol_t) -> List[_Segment]:
    """去掉宽度不超过端点分辨率的间隙"""
    kept = []
    for seg in segments:
        bounded = math.isfinite(seg.lo) and math.isfinite(seg.hi)
        if bounded and seg.hi - seg.lo <= tol_t * (1.0 + abs(seg.lo)):
            logger.debug(f"忽略宽度低于分辨率的间隙 ({seg.lo:.12g}, {seg.hi:.12g})")
            continue
        kept.append(seg)
    return kept


def _merge_gaps(segments: List[_Segment], tol_t) -> List[_Segment]:
    """合并重叠的间隙，以及在零点型端点处相接的间隙"""
    merged: List[_Segment] = []
    for seg in sorted(_drop_slivers(segments, tol_t), key=lambda s: (s.lo, s.hi)):
        if merged:
            prev = merged[-1]
            same = _same_point(prev.hi, seg.lo)
            overlapping = seg.lo < prev.hi and not same
            if overlapping or (same and (prev.hi_zero or seg.lo_zero)):
                if seg.hi > prev.hi:
                    prev.hi, prev.hi_zero = seg.hi, seg.hi_zero
                continue
        merged.append(_Segment(seg.lo, seg.hi, seg.lo_zero, seg.hi_zero, seg.params, seg.curve))
    return merged


def _complement(gaps: List[_Segment], lower: float, upper: float, domain, tol_t):
    """[lower, upper] 去掉开间隙后的支撑集"""
    pieces = []
    cur = lower
    for gap in gaps:
        if gap.hi <= cur:
            continue
        if gap.lo >= cur and cur <= upper:
            pieces.append((cur, min(gap.lo, upper)))
        cur = max(cur, gap.hi)
    if cur <= upper:
        pieces.append((cur, upper))

    cleaned = []
    for lo, hi in pieces:
        if math.isfinite(lo) and math.isfinite(hi) and hi - lo <= tol_t * (1.0 + abs(lo)):
            mid = 0.5 * (lo + hi)
            cleaned.append((mid, mid))
        elif lo <= hi:
            cleaned.append((lo, hi))
    return merge_pieces(cleaned, domain, tol=0.0)


def _circle_complement(gaps: List[_Segment], tol_t):
    gaps = _drop_slivers(gaps, tol_t)
    if not gaps:
        return SupportSet(((0.0, TWO_PI),), (), Domain.CIRCLE)

    arcs = []
    for gap in gaps:
        start = math.fmod(gap.lo, TWO_PI)
        if start < 0:
            start += TWO_PI
        arcs.append([start, start + (gap.hi - gap.lo)])
    arcs.sort()

    union = [arcs[0]]
    for lo, hi in arcs[1:]:
        if lo < union[-1][1] - 1e-12:
            union[-1][1] = max(union[-1][1], hi)
        else:
            union.append([lo, hi])
    while len(union) > 1 and union[-1][1] - TWO_PI > union[0][0] + 1e-12:
        first = union.pop(0)
        union[-1][1] = max(union[-1][1], first[1] + TWO_PI)

    pieces = []
    for (_, end), (start, _) in zip(union, union[1:] + [[union[0][0] + TWO_PI, 0.0]]):
        if start - end <= tol_t:
            mid = 0.5 * (start + end)
            pieces.append((mid, mid))
        else:
            pieces.append((end, start))

    intervals, points = [], []
    for lo, hi in pieces:
        start = math.fmod(lo, TWO_PI)
        if start < 0:
            start += TWO_PI
        if hi == lo:
            points.append(start)
        else:
            intervals.append((start, start + (hi - lo)))
    return SupportSet(tuple(sorted(intervals)), tuple(sorted(points)), Domain.CIRCLE)


def _diagnostics(m1, m2, comps1, comps2, curves, segments, support, extra=None):
    n1 = support_components(m1).component_count()
    n2 = support_components(m2).component_count()
    data = {
        "n": support.component_count(),
        "n1": n1,
        "n2": n2,
        "gap_components": [len(comps1), len(comps2)],
        "curves": len(curves),
        "segments_per_curve": [len(c.segments) for c in curves],
        "non_monotone": [
            [c.parent, list(c.interval)] for c in comps1 + comps2 if not c.monotone
        ],
    }
    if extra:
        data.update(extra)
    return data


def _shortcut(kind, m1, m2):
    """点质量输入：平移、伸缩或旋转另一个测度的支撑"""
    if not (is_point_mass(m1) or is_point_mass(m2)):
        return None
    point, other = (m1, m2) if is_point_mass(m1) else (m2, m1)
    c = point.atoms[0].position
    supp = support_components(other)
    if kind == "add":
        result = supp.translated(c)
    elif kind == "mult-r":
        result = supp.scaled(c) if c > 0 else SupportSet((), (0.0,), Domain.HALFLINE)
    else:
        result = supp.rotated(c)
    logger.info(f"点质量输入，支撑由 {kind} 平凡变换得到")
    return SupportResult(kind, result, diagnostics={
        "n": result.component_count(),
        "n1": support_components(m1).component_count(),
        "n2": support_components(m2).component_count(),
        "shortcut": True,
    })


def _run(kind, m1, m2, cfg):
    cfg = cfg or SupportConfig.from_config()
    shortcut = _shortcut(kind, m1, m2)
    if shortcut is not None:
        return shortcut, None, None, None, None

    mode = MODES[kind](m1, m2, cfg)
    comps1, comps2 = mode.components(1), mode.components(2)
    if kind == "mult-t":
        comps1 = [_with_monotone(mode, c) for c in comps1]
        comps2 = [_with_monotone(mode, c) for c in comps2]
    pairs = _pairs(comps1, comps2)
    curves, segments = _trace_all(mode, pairs, cfg)
    logger.debug(
        f"{kind}: {len(comps1)}+{len(comps2)} 个间隙分量, {len(curves)} 条曲线, "
        f"{len(segments)} 个间隙段"
    )
    return None, mode, (comps1, comps2), curves, segments


def _with_monotone(mode, comp):
    monotone = mode.check_monotone(comp)
    if not monotone:
        logger.warning(f"Im ψ 在间隙弧 {comp.interval} 上不单调，曲线结果仅供参考")
    return GapComponent(comp.interval, comp.f_sign, comp.parent, comp.values, comp.ends, monotone)


def _witnesses(gaps):
    return [GapWitness((g.lo, g.hi), g.curve, g.params, (g.lo_zero, g.hi_zero)) for g in gaps]


def support_additive(m1: Measure, m2: Measure, cfg: Optional[SupportConfig] = None) -> SupportResult:
    """μ₁ ⊞ μ₂ 的支撑

    Args:
        m1: 实轴上的测度
        m2: 实轴上的测度
        cfg: 曲线追踪参数

    Returns:
        SupportResult: 支撑、间隙及诊断信息
    """
    cfg = cfg or SupportConfig.from_config()
    shortcut, mode, comps, curves, segments = _run("add", m1, m2, cfg)
    if shortcut is not None:
        return shortcut

    h1, h2 = support_components(m1).hull(), support_components(m2).hull()
    gaps = _merge_gaps(segments, cfg.tol_t)
    support = _complement(gaps, h1[0] + h2[0], h1[1] + h2[1], Domain.REAL, cfg.tol_t)
    result = SupportResult("add", support, _witnesses(gaps), curves,
                           _diagnostics(m1, m2, comps[0], comps[1], curves, segments, support))
    result.diagnostics["bound"] = 2 * result.diagnostics["n1"] * result.diagnostics["n2"] - 1
    result.diagnostics["bound_satisfied"] = component_count_check(result)
    logger.info(f"⊞ 支撑: {support.component_count()} 个分支")
    return result


def support_mult_halfline(m1: Measure, m2: Measure,
                          cfg: Optional[SupportConfig] = None) -> SupportResult:
    """ℝ₊ 上 μ₁ ⊠ μ₂ 的支撑（谱变量）"""
    cfg = cfg or SupportConfig.from_config()
    shortcut, mode, comps, curves, segments = _run("mult-r", m1, m2, cfg)
    if shortcut is not None:
        return shortcut

    h1, h2 = support_components(m1).hull(), support_components(m2).hull()
    gaps = _merge_gaps(segments, cfg.tol_t)
    support = _complement(gaps, max(0.0, h1[0] * h2[0]), h1[1] * h2[1], Domain.HALFLINE,
                          cfg.tol_t)
    result = SupportResult("mult-r", support, _witnesses(gaps), curves,
                           _diagnostics(m1, m2, comps[0], comps[1], curves, segments, support))
    result.diagnostics["bound_satisfied"] = component_count_check(result)
    logger.info(f"⊠(ℝ₊) 支撑: {support.component_count()} 个分支")
    return result


def support_mult_circle(m1: Measure, m2: Measure,
                        cfg: Optional[SupportConfig] = None) -> SupportResult:
    """𝕋 上 μ₁ ⊠ μ₂ 的支撑（角度）

    诊断中记录配对曲线数（E 分量数，至多 n₁n₂）以及每条曲线上
    判据为负的段数。
    """
    cfg = cfg or SupportConfig.from_config()
    if is_haar(m1) or is_haar(m2):
        full = SupportSet(((0.0, TWO_PI),), (), Domain.CIRCLE)
        return SupportResult("mult-t", full, diagnostics={
            "n": 1,
            "n1": support_components(m1).component_count(),
            "n2": support_components(m2).component_count(),
            "haar": True,
        })

    shortcut, mode, comps, curves, segments = _run("mult-t", m1, m2, cfg)
    if shortcut is not None:
        return shortcut

    support = _circle_complement(segments, cfg.tol_t)
    gaps = [
        _Segment(lo, hi, False, False, (0.0, 0.0)) for lo, hi in support.gaps()
    ]
    diagnostics = _diagnostics(m1, m2, comps[0], comps[1], curves, segments, support)
    diagnostics["e_components"] = len(curves)
    diagnostics["e_bound"] = diagnostics["n1"] * diagnostics["n2"]
    result = SupportResult("mult-t", support, _witnesses(gaps), curves, diagnostics)
    result.diagnostics["bound_satisfied"] = component_count_check(result)
    logger.info(f"⊠(𝕋) 支撑: {support.component_count()} 个分支")
    return result


def component_count_check(result: SupportResult) -> bool:
    """分支数上界检查

    ⊞ 紧支撑时要求 n ≤ 2n₁n₂ - 1；𝕋 上比较配对曲线数与 n₁n₂，仅作诊断；
    ℝ₊ 上没有上界，恒为 True。
    """
    d = result.diagnostics
    n, n1, n2 = d.get("n"), d.get("n1"), d.get("n2")
    if n is None or n1 is None or n2 is None:
        return True
    if result.kind == "add":
        lo, hi = result.support.hull()
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return True
        return n <= 2 * n1 * n2 - 1
    if result.kind == "mult-t" and "e_components" in d:
        return d["e_components"] <= n1 * n2
    return True


# ============================================================================
# 配对判据与间隙点
# ============================================================================


def pair_criterion_additive(m1: Measure, m2: Measure, t1: float, t2: float, nodes: int = 200):
    """⊞ 配对判据

    Returns:
        tuple: (matches, value)；matches 表示 |G₁(t₁) - G₂(t₂)| < 1e-9(1 + |G₁|)，
        value = (F₁′(t₁) - 1)(F₂′(t₂) - 1) - 1，负值表示配对在 B 中

    Raises:
        PoleOfFError: G_j(t_j) = 0
        EvalOnSupportError: t_j 在支撑上
    """
    g1 = complex(cauchy_G(m1, float(t1), nodes)).real
    g2 = complex(cauchy_G(m2, float(t2), nodes)).real
    if g1 == 0.0 or g2 == 0.0:
        raise PoleOfFError(f"G 在配对点 ({t1}, {t2}) 处为零")
    matches = abs(g1 - g2) < 1e-9 * (1.0 + abs(g1))
    value = (f_prime(m1, t1, nodes) - 1.0) * (f_prime(m2, t2, nodes) - 1.0) - 1.0
    return matches, value


def gap_point_from_pair_additive(m1: Measure, m2: Measure, t1: float, t2: float,
                                 nodes: int = 200, band: float = 1e-10) -> float:
    """配对 (t₁, t₂) 对应的间隙点 t = t₁ + t₂ - F₁(t₁)

    Raises:
        CriterionFailedError: 配对不匹配或判据不小于 0
    """
    matches, value = pair_criterion_additive(m1, m2, t1, t2, nodes)
    if not matches or value >= -band:
        raise CriterionFailedError(
            f"配对 ({t1}, {t2}) 不满足判据: matches={matches}, value={value:.3e}"
        )
    g1 = complex(cauchy_G(m1, float(t1), nodes)).real
    return float(t1) + float(t2) - 1.0 / g1


# ============================================================================
# 往返检查
# ============================================================================


def _interior_points(interval, kind):
    lo, hi = interval
    if kind == "mult-t":
        width = hi - lo
        return [lo + f * width for f in (1e-3, 0.37, 1.0 - 1e-3)]
    if math.isinf(lo) and math.isinf(hi):
        return []
    if math.isinf(lo):
        return [hi - 1e-3 * max(1.0, abs(hi)), hi - 1.0]
    if math.isinf(hi):
        return [lo + 1e-3 * max(1.0, abs(lo)), lo + 1.0]
    width = hi - lo
    points = [lo + f * width for f in (1e-3, 0.37, 1.0 - 1e-3)]
    if kind == "mult-r":
        points = [p for p in points if p > 0]
    return points


# G 或 ψ(ψ+1) 低于此值时往返无法计算
ROUND_TRIP_DEGENERATE = 1e-12


def _degenerate_check(point, t1, t2, what):
    logger.warning(f"往返检查跳过: point={point}, {what} 退化")
    return RoundTripCheck(float(point), complex(t1), complex(t2), math.nan, math.inf, False)


def _round_trip_point(kind, m1, m2, point, cfg, tol):
    d1, d2 = discretize(m1, cfg.nodes), discretize(m2, cfg.nodes)
    tiny = ROUND_TRIP_DEGENERATE

    if kind == "add":
        value = omega_additive_boundary(m1, m2, point, cfg)
        t1, t2 = value.omega1, value.omega2
        g1, g2 = complex(d1.cauchy(t1.real)).real, complex(d2.cauchy(t2.real)).real
        if not (abs(g1) >= tiny and abs(g2) >= tiny):
            return _degenerate_check(point, t1, t2, f"G(ω) = ({g1:.3e}, {g2:.3e})")
        var1, var2 = d1.gap_variance(t1.real)[0], d2.gap_variance(t2.real)[0]
        crit = float(var1 * var2 / (g1 * g1 * g2 * g2) - 1.0)
        back = t1.real + t2.real - 1.0 / g1
        error = abs(back - point)
        real = abs(t1.imag) + abs(t2.imag) < 1e-6
        match = abs(g1 - g2) < 1e-6 * (1.0 + abs(g1))
    elif kind == "mult-r":
        t = 1.0 / point
        value = omega_mult_halfline_boundary(m1, m2, t, cfg)
        t1, t2 = value.omega1, value.omega2
        p1 = complex(d1.psi(t1.real)).real
        p2 = complex(d2.psi(t2.real)).real
        if not (abs(p1 * (p1 + 1.0)) >= tiny and abs(t1.real * t2.real) >= tiny):
            return _degenerate_check(point, t1, t2, f"ψ(ω₁) = {p1:.3e}")
        var1 = d1.resolvent_variance(t1.real)[0]
        var2 = d2.resolvent_variance(t2.real)[0]
        crit = float(var1 * var2 / (p1 * (p1 + 1.0)) ** 2 - 1.0)
        back = p1 / ((1.0 + p1) * t1.real * t2.real)
        error = abs(back - point) / max(1.0, abs(point))
        real = abs(t1.imag) + abs(t2.imag) < 1e-6
        match = abs(p1 - p2) < 1e-6 * (1.0 + abs(p1))
    else:
        z = np.exp(-1j * point)
        value = omega_mult_circle_boundary(m1, m2, z, cfg)
        t1, t2 = value.omega1, value.omega2
        psi1 = complex(d1.psi(t1))
        psi2 = complex(d2.psi(t2))
        if not abs(psi1 * (psi1 + 1.0)) >= tiny:
            return _degenerate_check(point, t1, t2, f"ψ(ω₁) = {psi1:.3e}")
        var1 = abs(complex(d1.resolvent_variance(t1)[0]))
        var2 = abs(complex(d2.resolvent_variance(t2)[0]))
        crit = float(var1 * var2 / abs(psi1 * (psi1 + 1.0)) ** 2 - 1.0)
        eta1 = psi1 / (1.0 + psi1)
        back = np.conj(t1 * t2 / eta1)
        error = abs(back - np.exp(1j * point))
        real = abs(abs(t1) - 1.0) + abs(abs(t2) - 1.0) < 1e-6
        match = abs(psi1 - psi2) < 1e-6 * (1.0 + abs(psi1))

    ok = bool(real and match and crit < 0 and error < tol)
    if not ok:
        logger.warning(
            f"往返检查失败: point={point}, criterion={crit:.3e}, error={error:.3e}"
        )
    return RoundTripCheck(float(point), complex(t1), complex(t2), crit, float(error), ok)
