#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
概率测度

ℝ、ℝ₊ 与单位圆 𝕋 上的概率测度：原子 + 绝对连续分量。
提供校验、分布函数与分位数、支撑分支枚举，以及把紧支撑测度
逼近为边缘平方根型密度测度的构造。

闭式 Cauchy 变换覆盖 Semicircle、Arcsine、MarchenkoPastur、Cauchy、
Uniform、Histogram；其余族走 Gauss 求积。
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from ..utils.numerics import gauss_jacobi, gauss_legendre, generalized_inverse
from .errors import (
    DomainViolationError,
    InfinitelyManyComponentsError,
    MassNotOneError,
    NegativeMassError,
    UnboundedSupportError,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MASS_TOL = 1e-6
MERGE_TOL = 1e-12
MAX_COMPONENTS = 100000


class Domain(str, Enum):
    """测度所在的域"""

    REAL = "real"
    HALFLINE = "halfline"
    CIRCLE = "circle"


def _sqrt_pair(z, a, b):
    """√(z-a)·√(z-b)，割线在 [a, b]，无穷远处 ~ z"""
    return np.sqrt(z - a) * np.sqrt(z - b)


def _as_complex(z):
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z.astype(complex)
    return z


# ============================================================================
# 绝对连续分量
# ============================================================================


class AcComponent:
    """绝对连续分量基类

    density / cdf / nodes 都针对归一化（质量 1）的分量，
    weight 是分量在测度中的质量。
    """

    family = "base"
    closed_form = False

    @property
    def interval(self) -> Tuple[float, float]:
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def nodes(self, n):
        raise NotImplementedError

    def cauchy(self, z):
        raise NotImplementedError(f"{self.family} 没有闭式 Cauchy 变换")

    def cauchy_prime(self, z):
        raise NotImplementedError(f"{self.family} 没有闭式 Cauchy 变换")

    def check(self, domain):
        """检查参数和所在域，失败抛 MeasureError 子类"""
        a, b = self.interval
        if not a < b:
            raise DomainViolationError(f"{self.family}: 区间 [{a}, {b}] 非法")
        if self.weight < 0:
            raise NegativeMassError(f"{self.family}: 权重 {self.weight} 为负")
        if self.weight == 0:
            raise NegativeMassError(f"{self.family}: 分量质量必须为正")
        if domain == Domain.HALFLINE and a < 0:
            raise DomainViolationError(f"{self.family}: 区间 [{a}, {b}] 不在 ℝ₊ 内")
        if domain == Domain.CIRCLE and not (0.0 <= a < TWO_PI and b - a <= TWO_PI):
            raise DomainViolationError(f"{self.family}: 弧 [{a}, {b}] 不在 [0, 2π] 内")

    def with_weight(self, weight):
        from dataclasses import replace

        return replace(self, weight=weight)

    def to_spec(self) -> Dict:
        raise NotImplementedError


def _cdf_table(component, size=4097):
    """数值累积分布表，变量代换 t = a + (b-a)(1-cos θ)/2 消去边缘奇性"""
    a, b = component.interval
    theta = np.linspace(0.0, math.pi, size)
    t = a + 0.5 * (b - a) * (1.0 - np.cos(theta))
    jac = 0.5 * (b - a) * np.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.nan_to_num(component.density(t) * jac)
    cum = integrate.cumulative_trapezoid(f, theta, initial=0.0)
    return t, cum / cum[-1]


@dataclass(frozen=True)
class Semicircle(AcComponent):
    """半圆律，中心 center，方差 variance"""

    center: float = 0.0
    variance: float = 1.0
    weight: float = 1.0

    family = "semicircle"
    closed_form = True

    @property
    def radius(self):
        return 2.0 * math.sqrt(self.variance)

    @property
    def interval(self):
        return (self.center - self.radius, self.center + self.radius)

    def check(self, domain):
        if self.variance <= 0:
            raise DomainViolationError(f"semicircle: 方差 {self.variance} 必须为正")
        super().check(domain)

    def density(self, x):
        u = np.asarray(x, dtype=float) - self.center
        inside = np.clip(4.0 * self.variance - u * u, 0.0, None)
        return np.sqrt(inside) / (2.0 * math.pi * self.variance)

    def cdf(self, x):
        u = np.clip((np.asarray(x, dtype=float) - self.center) / self.radius, -1.0, 1.0)
        return 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / math.pi

    def nodes(self, n):
        a, b = self.interval
        return gauss_jacobi(a, b, n, 0.5, 0.5)

    def cauchy(self, z):
        w = _as_complex(z) - self.center
        sq = _sqrt_pair(w, -self.radius, self.radius)
        return 2.0 / (w + sq)

    def cauchy_prime(self, z):
        w = _as_complex(z) - self.center
        sq = _sqrt_pair(w, -self.radius, self.radius)
        g = 2.0 / (w + sq)
        return -0.5 * g * g * (1.0 + w / sq)

    def to_spec(self):
        return {"family": self.family, "center": self.center,
                "variance": self.variance, "weight": self.weight}


@dataclass(frozen=True)
class Arcsine(AcComponent):
    """反正弦律 1/(π√((t-a)(b-t)))"""

    a: float = -1.0
    b: float = 1.0
    weight: float = 1.0

    family = "arcsine"
    closed_form = True

    @property
    def interval(self):
        return (self.a, self.b)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.a) & (x < self.b)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = 1.0 / (math.pi * np.sqrt((x - self.a) * (self.b - x)))
        return np.where(inside, value, 0.0)

    def cdf(self, x):
        u = np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)
        return 2.0 / math.pi * np.arcsin(np.sqrt(u))

    def nodes(self, n):
        return gauss_jacobi(self.a, self.b, n, -0.5, -0.5)

    def cauchy(self, z):
        return 1.0 / _sqrt_pair(_as_complex(z), self.a, self.b)

    def cauchy_prime(self, z):
        z = _as_complex(z)
        sq = _sqrt_pair(z, self.a, self.b)
        return -(z - 0.5 * (self.a + self.b)) / sq**3

    def to_spec(self):
        return {"family": self.family, "a": self.a, "b": self.b, "weight": self.weight}


@dataclass(frozen=True)
class MarchenkoPastur(AcComponent):
    """Marchenko-Pastur 律（单位方差，比例 ratio ≤ 1）"""

    ratio: float = 1.0
    weight: float = 1.0

    family = "marchenko_pastur"
    closed_form = True

    @property
    def interval(self):
        r = math.sqrt(self.ratio)
        return ((1.0 - r) ** 2, (1.0 + r) ** 2)

    def check(self, domain):
        if not 0.0 < self.ratio <= 1.0:
            raise DomainViolationError(
                f"marchenko_pastur: 比例 {self.ratio} 必须在 (0, 1] 内，"
                f"比例大于 1 时请显式加上 0 处的原子"
            )
        super().check(domain)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.interval
        inside = (x > a) & (x < b)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.sqrt(np.clip((b - x) * (x - a), 0.0, None)) / (
                2.0 * math.pi * self.ratio * x
            )
        return np.where(inside, value, 0.0)

    def cdf(self, x):
        table = self.__dict__.get("_table")
        if table is None:
            table = _cdf_table(self)
            object.__setattr__(self, "_table", table)
        t, cum = table
        return np.interp(np.asarray(x, dtype=float), t, cum, left=0.0, right=1.0)

    def nodes(self, n):
        a, b = self.interval
        if a > 0:
            x, w = gauss_jacobi(a, b, n, 0.5, 0.5)
            w = w / x
        else:
            x, w = gauss_jacobi(a, b, n, -0.5, 0.5)
        return x, w / np.sum(w)

    def cauchy(self, z):
        z = _as_complex(z)
        a, b = self.interval
        sq = _sqrt_pair(z, a, b)
        return 2.0 / (z + self.ratio - 1.0 + sq)

    def cauchy_prime(self, z):
        z = _as_complex(z)
        a, b = self.interval
        sq = _sqrt_pair(z, a, b)
        denom = z + self.ratio - 1.0 + sq
        dsq = (z - 0.5 * (a + b)) / sq
        return -2.0 * (1.0 + dsq) / denom**2

    def to_spec(self):
        return {"family": self.family, "ratio": self.ratio, "weight": self.weight}


@dataclass(frozen=True)
class Cauchy(AcComponent):
    """Cauchy 分布，只能作为 ℝ 上的完整测度"""

    location: float = 0.0
    scale: float = 1.0
    weight: float = 1.0

    family = "cauchy"
    closed_form = True

    @property
    def interval(self):
        return (-math.inf, math.inf)

    def check(self, domain):
        if domain != Domain.REAL:
            raise DomainViolationError("cauchy: 只允许在实轴上")
        if self.scale <= 0:
            raise DomainViolationError(f"cauchy: 尺度 {self.scale} 必须为正")
        if self.weight <= 0:
            raise NegativeMassError("cauchy: 分量质量必须为正")

    def density(self, x):
        u = (np.asarray(x, dtype=float) - self.location) / self.scale
        return 1.0 / (math.pi * self.scale * (1.0 + u * u))

    def cdf(self, x):
        u = (np.asarray(x, dtype=float) - self.location) / self.scale
        return 0.5 + np.arctan(u) / math.pi

    def quantile(self, s):
        return self.location + self.scale * np.tan(math.pi * (np.asarray(s) - 0.5))

    def nodes(self, n):
        raise UnboundedSupportError("cauchy: 无紧支撑，不能离散化")

    def _shift(self, z):
        # 上半平面取 +iγ，下半平面取 -iγ；实轴上取上半平面的边界值
        sign = np.where(np.imag(z) >= 0, 1.0, -1.0)
        return z - self.location + 1j * self.scale * sign

    def cauchy(self, z):
        return 1.0 / self._shift(_as_complex(z))

    def cauchy_prime(self, z):
        return -1.0 / self._shift(_as_complex(z)) ** 2

    def to_spec(self):
        return {"family": self.family, "location": self.location,
                "scale": self.scale, "weight": self.weight}


@dataclass(frozen=True)
class Uniform(AcComponent):
    """[a, b] 上的均匀分布（圆上为弧长均匀）"""

    a: float = 0.0
    b: float = 1.0
    weight: float = 1.0

    family = "uniform"
    closed_form = True

    @property
    def interval(self):
        return (self.a, self.b)

    @property
    def is_full_circle(self):
        return self.a == 0.0 and abs(self.b - TWO_PI) < 1e-12

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def nodes(self, n):
        x, w = gauss_legendre(self.a, self.b, n)
        return x, w / (self.b - self.a)

    def cauchy(self, z):
        z = _as_complex(z)
        h = self.b - self.a
        return np.log1p(h / (z - self.b)) / h

    def cauchy_prime(self, z):
        z = _as_complex(z)
        return -1.0 / ((z - self.a) * (z - self.b))

    def to_spec(self):
        return {"family": self.family, "a": self.a, "b": self.b, "weight": self.weight}


@dataclass(frozen=True)
class Jacobi(AcComponent):
    """Jacobi 型密度 (t-a)^alpha (b-t)^beta / normalizer"""

    a: float = 0.0
    b: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    weight: float = 1.0

    family = "jacobi"

    @property
    def interval(self):
        return (self.a, self.b)

    @property
    def normalizer(self):
        length = self.b - self.a
        return length ** (self.alpha + self.beta + 1.0) * special.beta(
            self.alpha + 1.0, self.beta + 1.0
        )

    def check(self, domain):
        if self.alpha <= -1 or self.beta <= -1:
            raise DomainViolationError(
                f"jacobi: 指数 ({self.alpha}, {self.beta}) 必须大于 -1"
            )
        super().check(domain)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.a) & (x < self.b)
        xc = np.clip(x, self.a, self.b)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = (xc - self.a) ** self.alpha * (self.b - xc) ** self.beta
        return np.where(inside, value / self.normalizer, 0.0)

    def cdf(self, x):
        u = np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)
        return special.betainc(self.alpha + 1.0, self.beta + 1.0, u)

    def nodes(self, n):
        return gauss_jacobi(self.a, self.b, n, self.alpha, self.beta)

    def to_spec(self):
        return {"family": self.family, "a": self.a, "b": self.b, "alpha": self.alpha,
                "beta": self.beta, "weight": self.weight}


@dataclass(frozen=True)
class Table(AcComponent):
    """过 (nodes, weights) 的分段线性密度，端点外延为常数"""

    a: float = 0.0
    b: float = 1.0
    xs: Tuple[float, ...] = ()
    ys: Tuple[float, ...] = ()
    weight: float = 1.0

    family = "table"

    @property
    def interval(self):
        return (self.a, self.b)

    def _knots(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        grid = np.unique(np.concatenate([[self.a, self.b], xs[(xs > self.a) & (xs < self.b)]]))
        values = np.interp(grid, xs, ys)
        mass = np.trapz(values, grid) if hasattr(np, "trapz") else np.trapezoid(values, grid)
        return grid, values, mass

    @property
    def is_constant(self):
        return len(set(self.ys)) == 1

    def check(self, domain):
        if len(self.xs) == 0 or len(self.xs) != len(self.ys):
            raise DomainViolationError("table: nodes 与 weights 长度必须一致且非空")
        if any(y < 0 for y in self.ys):
            raise NegativeMassError("table: 密度值不能为负")
        if list(self.xs) != sorted(self.xs):
            raise DomainViolationError("table: nodes 必须递增")
        super().check(domain)
        if self._knots()[2] <= 0:
            raise NegativeMassError("table: 密度积分为零")

    def density(self, x):
        grid, values, mass = self._knots()
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, np.interp(x, grid, values) / mass, 0.0)

    def cdf(self, x):
        grid, values, mass = self._knots()
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        seg = np.diff(grid)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * seg)])
        idx = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, len(seg) - 1)
        dx = x - grid[idx]
        slope = (values[idx + 1] - values[idx]) / seg[idx]
        partial = cum[idx] + values[idx] * dx + 0.5 * slope * dx * dx
        return np.clip(partial / mass, 0.0, 1.0)

    def nodes(self, n):
        grid, _, _ = self._knots()
        per = max(4, int(n) // (len(grid) - 1))
        xs, ws = [], []
        for lo, hi in zip(grid[:-1], grid[1:]):
            x, w = gauss_legendre(lo, hi, per)
            xs.append(x)
            ws.append(w * self.density(x))
        x = np.concatenate(xs)
        w = np.concatenate(ws)
        return x, w / np.sum(w)

    def to_spec(self):
        return {"family": self.family, "a": self.a, "b": self.b, "nodes": list(self.xs),
                "weights": list(self.ys), "weight": self.weight}


@dataclass(frozen=True)
class Histogram(AcComponent):
    """分段常数密度，edges 为分箱边界，masses 为各箱质量（内部归一化）"""

    edges: Tuple[float, ...] = (0.0, 1.0)
    masses: Tuple[float, ...] = (1.0,)
    weight: float = 1.0

    family = "histogram"
    closed_form = True

    @property
    def interval(self):
        return (self.edges[0], self.edges[-1])

    def _arrays(self):
        e = np.asarray(self.edges, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        return e, m / np.sum(m)

    def check(self, domain):
        if len(self.edges) != len(self.masses) + 1:
            raise DomainViolationError("histogram: edges 应比 masses 多一个")
        if any(m < 0 for m in self.masses) or sum(self.masses) <= 0:
            raise NegativeMassError("histogram: 质量必须非负且和为正")
        if any(hi <= lo for lo, hi in zip(self.edges[:-1], self.edges[1:])):
            raise DomainViolationError("histogram: edges 必须严格递增")
        super().check(domain)

    def density(self, x):
        e, m = self._arrays()
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, len(m) - 1)
        inside = (x >= e[0]) & (x <= e[-1])
        return np.where(inside, m[idx] / np.diff(e)[idx], 0.0)

    def cdf(self, x):
        e, m = self._arrays()
        return np.interp(np.asarray(x, dtype=float), e, np.concatenate([[0.0], np.cumsum(m)]))

    def nodes(self, n):
        e, m = self._arrays()
        per = max(2, int(n) // len(m))
        xs, ws = [], []
        for lo, hi, mass in zip(e[:-1], e[1:], m):
            x, w = gauss_legendre(lo, hi, per)
            xs.append(x)
            ws.append(w * mass / (hi - lo))
        return np.concatenate(xs), np.concatenate(ws)

    def cauchy(self, z):
        e, m = self._arrays()
        z = _as_complex(z)[..., None]
        h = np.diff(e)
        return np.sum(m / h * np.log1p(h / (z - e[1:])), axis=-1)

    def cauchy_prime(self, z):
        e, m = self._arrays()
        z = _as_complex(z)[..., None]
        h = np.diff(e)
        return np.sum(m / h * (1.0 / (z - e[:-1]) - 1.0 / (z - e[1:])), axis=-1)

    def to_spec(self):
        return {"family": self.family, "edges": list(self.edges),
                "masses": list(self.masses), "weight": self.weight}


FAMILIES = {
    cls.family: cls
    for cls in (Semicircle, Arcsine, MarchenkoPastur, Cauchy, Uniform, Jacobi, Table, Histogram)
}


# ============================================================================
# 测度与支撑集
# ============================================================================


@dataclass(frozen=True)
class Atom:
    """点质量"""

    position: float
    mass: float


@dataclass(frozen=True)
class Measure:
    """概率测度：原子 + 绝对连续分量"""

    domain: Domain
    atoms: Tuple[Atom, ...] = ()
    ac_components: Tuple[AcComponent, ...] = ()
    _cache: Dict = field(default_factory=dict, init=False, compare=False,
                         hash=False, repr=False)

    def total_mass(self):
        return sum(a.mass for a in self.atoms) + sum(c.weight for c in self.ac_components)

    @property
    def is_unbounded(self):
        return any(isinstance(c, Cauchy) for c in self.ac_components)

    def atom_arrays(self):
        pos = np.array([a.position for a in self.atoms], dtype=float)
        mass = np.array([a.mass for a in self.atoms], dtype=float)
        return pos, mass


@dataclass(frozen=True)
class SupportSet:
    """有序、互不相交的闭区间（圆上为弧）加孤立点

    圆上的弧记为 (θ1, θ2)，0 ≤ θ1 < 2π，θ1 < θ2 ≤ θ1 + 2π。
    """

    intervals: Tuple[Tuple[float, float], ...] = ()
    isolated_points: Tuple[float, ...] = ()
    domain: Domain = Domain.REAL

    def component_count(self):
        return len(self.intervals) + len(self.isolated_points)

    @property
    def is_empty(self):
        return self.component_count() == 0

    @property
    def is_full_circle(self):
        return self.domain == Domain.CIRCLE and any(
            hi - lo >= TWO_PI - 1e-12 for lo, hi in self.intervals
        )

    def pieces(self):
        """所有分支，孤立点记为退化区间，按左端排序"""
        items = list(self.intervals) + [(p, p) for p in self.isolated_points]
        return sorted(items)

    def hull(self):
        items = self.pieces()
        if not items:
            return (math.nan, math.nan)
        return (min(lo for lo, _ in items), max(hi for _, hi in items))

    def distance(self, x):
        """点到支撑的距离（圆上为角距离），向量化"""
        x = np.asarray(x, dtype=float)
        best = np.full(x.shape, math.inf)
        for lo, hi in self.pieces():
            if self.domain == Domain.CIRCLE:
                if hi - lo >= TWO_PI - 1e-12:
                    return np.zeros(x.shape)
                rel = np.mod(x - lo, TWO_PI)
                span = hi - lo
                d = np.where(rel <= span, 0.0, np.minimum(rel - span, TWO_PI - rel))
            else:
                d = np.maximum(np.maximum(lo - x, x - hi), 0.0)
            best = np.minimum(best, d)
        return best

    def contains(self, x, tol=0.0):
        return self.distance(x) <= tol

    def gaps(self):
        """补集的连通分支（开区间/开弧），实轴上含无界分支"""
        items = self.pieces()
        if self.domain == Domain.CIRCLE:
            if not items or self.is_full_circle:
                return []
            out = []
            for (lo, hi), (nlo, _) in zip(items, items[1:] + [(items[0][0] + TWO_PI, 0.0)]):
                if nlo - hi > MERGE_TOL:
                    out.append((hi, nlo))
            return out
        if not items:
            return [(-math.inf, math.inf)]
        out = []
        if items[0][0] > -math.inf:
            out.append((-math.inf, items[0][0]))
        for (_, hi), (nlo, _) in zip(items[:-1], items[1:]):
            if nlo - hi > MERGE_TOL:
                out.append((hi, nlo))
        if items[-1][1] < math.inf:
            out.append((items[-1][1], math.inf))
        return out

    def translated(self, c):
        return SupportSet(
            tuple((lo + c, hi + c) for lo, hi in self.intervals),
            tuple(p + c for p in self.isolated_points),
            self.domain,
        )

    def scaled(self, c):
        return SupportSet(
            tuple((lo * c, hi * c) for lo, hi in self.intervals),
            tuple(p * c for p in self.isolated_points),
            self.domain,
        )

    def rotated(self, angle):
        pieces = [(lo + angle, hi + angle) for lo, hi in self.intervals]
        pieces += [(p + angle, p + angle) for p in self.isolated_points]
        return merge_pieces(pieces, Domain.CIRCLE)

    def to_dict(self):
        return {
            "domain": self.domain.value,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "isolated_points": list(self.isolated_points),
            "components": self.component_count(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple((float(lo), float(hi)) for lo, hi in data.get("intervals", [])),
            tuple(float(p) for p in data.get("isolated_points", [])),
            Domain(data.get("domain", "real")),
        )


def merge_pieces(pieces, domain=Domain.REAL, tol=MERGE_TOL):
    """合并闭区间（含退化区间），距离小于 tol 视为相接

    Args:
        pieces: (lo, hi) 列表
        domain: 所在的域
        tol: 合并容差

    Returns:
        SupportSet: 合并后的支撑集
    """
    if domain == Domain.CIRCLE:
        norm = []
        for lo, hi in pieces:
            span = hi - lo
            if span >= TWO_PI - tol:
                return SupportSet(((0.0, TWO_PI),), (), domain)
            start = math.fmod(lo, TWO_PI)
            if start < 0:
                start += TWO_PI
            norm.append((start, start + span))
        pieces = norm

    merged: List[List[float]] = []
    for lo, hi in sorted(pieces):
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    if domain == Domain.CIRCLE and len(merged) > 1:
        # 跨过 2π 的弧与开头的弧合并
        while len(merged) > 1 and merged[-1][1] - TWO_PI >= merged[0][0] - tol:
            first = merged.pop(0)
            merged[-1][1] = max(merged[-1][1], first[1] + TWO_PI)
        if merged[-1][1] - merged[-1][0] >= TWO_PI - tol:
            return SupportSet(((0.0, TWO_PI),), (), domain)
    if domain == Domain.CIRCLE and len(merged) == 1 and merged[0][1] - merged[0][0] >= TWO_PI - tol:
        return SupportSet(((0.0, TWO_PI),), (), domain)

    intervals = tuple((lo, hi) for lo, hi in merged if hi - lo > tol)
    points = tuple(lo for lo, hi in merged if hi - lo <= tol)
    return SupportSet(intervals, points, domain)


# ============================================================================
# 操作
# ============================================================================


def validate(m: Measure) -> Measure:
    """校验并归一化测度

    质量和偏离 1 不超过 1e-6 时按比例缩放，原子按位置排序。

    Args:
        m: 待校验测度

    Returns:
        Measure: 归一化后的测度

    Raises:
        NegativeMassError: 质量为负
        MassNotOneError: 总质量偏离 1 超过 1e-6
        DomainViolationError: 位置或区间不属于所在域
    """
    domain = Domain(m.domain)
    if not m.atoms and not m.ac_components:
        raise MassNotOneError("测度为空")

    for atom in m.atoms:
        if not math.isfinite(atom.position):
            raise DomainViolationError(f"原子位置 {atom.position} 不是有限数")
        if atom.mass < 0:
            raise NegativeMassError(f"原子 {atom.position} 的质量 {atom.mass} 为负")
        if atom.mass == 0 or atom.mass > 1 + MASS_TOL:
            raise DomainViolationError(f"原子 {atom.position} 的质量 {atom.mass} 不在 (0, 1] 内")
        if domain == Domain.HALFLINE and atom.position < 0:
            raise DomainViolationError(f"ℝ₊ 上的原子位置 {atom.position} 为负")
        if domain == Domain.CIRCLE and not 0.0 <= atom.position < TWO_PI:
            raise DomainViolationError(f"圆上的原子角度 {atom.position} 不在 [0, 2π) 内")

    positions = sorted(a.position for a in m.atoms)
    for left, right in zip(positions, positions[1:]):
        if right - left <= MERGE_TOL:
            raise DomainViolationError(f"原子位置重复: {left}")

    for comp in m.ac_components:
        comp.check(domain)

    if any(isinstance(c, Cauchy) for c in m.ac_components) and (
        len(m.ac_components) > 1 or m.atoms
    ):
        raise DomainViolationError("cauchy 只能作为完整测度出现")

    total = m.total_mass()
    if abs(total - 1.0) > MASS_TOL:
        raise MassNotOneError(f"总质量 {total:.9f} 不等于 1")

    atoms = tuple(
        Atom(a.position, a.mass / total) for a in sorted(m.atoms, key=lambda a: a.position)
    )
    comps = tuple(c.with_weight(c.weight / total) for c in m.ac_components)
    return Measure(domain, atoms, comps)


def is_point_mass(m: Measure) -> bool:
    """是否为单个点质量"""
    return len(m.atoms) == 1 and not m.ac_components


def is_haar(m: Measure) -> bool:
    """是否为圆上的 Haar 测度（整圆均匀）"""
    if m.domain != Domain.CIRCLE or m.atoms or len(m.ac_components) != 1:
        return False
    comp = m.ac_components[0]
    if isinstance(comp, Uniform):
        return comp.is_full_circle
    if isinstance(comp, Table):
        return comp.is_constant and comp.a == 0.0 and abs(comp.b - TWO_PI) < 1e-12
    return False


def cdf(m: Measure, t):
    """分布函数 F(t) = μ((-∞, t])，向量化

    圆上按角度 [0, 2π) 计算。
    """
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape)
    circle = m.domain == Domain.CIRCLE
    for atom in m.atoms:
        total = total + np.where(t >= atom.position, atom.mass, 0.0)
    for comp in m.ac_components:
        part = comp.cdf(t)
        if circle and comp.interval[1] > TWO_PI:
            # 越过 2π 的部分绕回 [0, b - 2π]
            wrapped = comp.cdf(np.minimum(t, TWO_PI) + TWO_PI) - comp.cdf(TWO_PI)
            part = part + np.where(t >= 0.0, wrapped, 0.0)
        total = total + comp.weight * part
    return total


def _inverse_cdf(m: Measure, s):
    s_arr = np.asarray(s, dtype=float)
    if np.any((s_arr <= 0.0) | (s_arr >= 1.0)):
        raise ValueError("分位数水平必须在 (0, 1) 内")

    if m.is_unbounded:
        result = m.ac_components[0].quantile(s_arr)
        return float(result) if np.ndim(s) == 0 else result

    lo, hi = support_components(m).hull()
    if m.domain == Domain.CIRCLE:
        lo, hi = 0.0, TWO_PI
    width = max(hi - lo, 1.0)
    result = generalized_inverse(lambda t: cdf(m, t), s_arr, lo - width, hi)

    # 吸附到原子位置，消除二分残差
    if m.atoms:
        pos, _ = m.atom_arrays()
        diff = np.abs(result[..., None] - pos)
        nearest = np.argmin(diff, axis=-1)
        snap = np.min(diff, axis=-1)
        result = np.where(snap <= 1e-11 * width, pos[nearest], result)

    return float(result) if np.ndim(s) == 0 else result


def quantile(m: Measure, s):
    """右连续广义逆 x(s) = inf{t : F(t) > s}

    Args:
        m: ℝ 或 ℝ₊ 上的测度
        s: (0, 1) 内的水平，标量或数组

    Returns:
        分位数

    Raises:
        DomainViolationError: 圆上的测度
    """
    if m.domain == Domain.CIRCLE:
        raise DomainViolationError("圆上的测度没有分位数，请使用 angular_quantile")
    return _inverse_cdf(m, s)


def angular_quantile(m: Measure, s):
    """圆上测度按角度 [0, 2π) 的分位数，供随机矩阵对角阵使用"""
    if m.domain != Domain.CIRCLE:
        raise DomainViolationError("angular_quantile 只用于圆上的测度")
    result = np.mod(_inverse_cdf(m, s), TWO_PI)
    return float(result) if np.ndim(s) == 0 else result


def support_components(m: Measure) -> SupportSet:
    """支撑的连通分支

    原子与绝对连续区间合并，相接（距离 < 1e-12）即合并。
    """
    cached = m._cache.get("support")
    if cached is not None:
        return cached

    pieces = [(a.position, a.position) for a in m.atoms]
    pieces += [comp.interval for comp in m.ac_components]
    result = merge_pieces(pieces, Domain(m.domain))
    m._cache["support"] = result
    return result


def mean(m: Measure) -> float:
    """一阶矩（ℝ/ℝ₊）"""
    return _moment(m, 1)


def variance(m: Measure) -> float:
    """方差（ℝ/ℝ₊）"""
    return _moment(m, 2) - _moment(m, 1) ** 2


def _moment(m, k):
    if m.domain == Domain.CIRCLE:
        raise DomainViolationError("圆上的测度请使用 circular_mean")
    if m.is_unbounded:
        return math.nan
    total = sum(a.mass * a.position**k for a in m.atoms)
    for comp in m.ac_components:
        x, w = comp.nodes(64)
        total += comp.weight * float(np.sum(w * x**k))
    return total


def circular_mean(m: Measure) -> complex:
    """∫ t dμ(t)，t = e^{iθ}"""
    if m.domain != Domain.CIRCLE:
        raise DomainViolationError("circular_mean 只用于圆上的测度")
    total = sum(a.mass * np.exp(1j * a.position) for a in m.atoms)
    for comp in m.ac_components:
        if isinstance(comp, Uniform) and comp.is_full_circle:
            continue
        x, w = comp.nodes(256)
        total += comp.weight * complex(np.sum(w * np.exp(1j * x)))
    return complex(total)


def ac_density(m: Measure, x):
    """绝对连续部分的密度（不含原子）"""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    for comp in m.ac_components:
        total = total + comp.weight * comp.density(x)
    return total


def jacobi_approximate(m: Measure, eps: float, edge_exponent: float = 0.5) -> Measure:
    """构造边缘平方根型的绝对连续逼近测度

    以步长 h < eps 的网格 kh 切分，每个格子保留原测度的质量，
    因而两者的分布函数在所有 kh 处相等、分位数耦合距离小于 h。
    每个支撑分支的外侧格子用指数 edge_exponent 的 Jacobi 密度，
    内部格子用分段常数密度。

    Args:
        m: ℝ 上紧支撑、有限分支的测度
        eps: 精度
        edge_exponent: 外侧边缘的密度指数

    Returns:
        Measure: 逼近测度

    Raises:
        UnboundedSupportError: 支撑无界
        InfinitelyManyComponentsError: 分支过多，网格无法分离
    """
    if eps <= 0:
        raise ValueError("eps 必须为正")
    if m.domain != Domain.REAL:
        raise DomainViolationError("jacobi_approximate 只用于实轴上的测度")
    if m.is_unbounded:
        raise UnboundedSupportError("支撑无界，无法逼近")

    support = support_components(m)
    pieces = support.pieces()
    if len(pieces) > MAX_COMPONENTS:
        raise InfinitelyManyComponentsError(f"支撑分支数 {len(pieces)} 超过上限")

    min_gap = min((b[0] - a[1] for a, b in zip(pieces, pieces[1:])), default=math.inf)
    h = min(0.5 * eps * (1.0 - 1e-9), min_gap / 3.0)
    if h <= 0:
        raise InfinitelyManyComponentsError("支撑分支无法用网格分离")

    components: List[AcComponent] = []
    for lo, hi in pieces:
        k_lo = int(math.floor(lo / h)) - 1
        k_hi = int(math.ceil(hi / h)) + 1
        ks = np.arange(k_lo, k_hi + 1)
        edges = ks * h
        masses = np.diff(cdf(m, edges))
        keep = np.nonzero(masses > 1e-15)[0]
        first, last = keep[0], keep[-1]
        cell_mass = masses[first:last + 1]
        cell_lo = edges[first:last + 1]

        if len(cell_mass) == 1:
            components.append(
                Jacobi(cell_lo[0], cell_lo[0] + h, edge_exponent, edge_exponent,
                       float(cell_mass[0]))
            )
            continue

        components.append(
            Jacobi(cell_lo[0], cell_lo[0] + h, edge_exponent, 0.0, float(cell_mass[0]))
        )
        if len(cell_mass) > 2:
            inner = cell_mass[1:-1]
            components.append(
                Histogram(
                    tuple(float(e) for e in edges[first + 1:last + 1]),
                    tuple(float(c) for c in inner),
                    float(np.sum(inner)),
                )
            )
        components.append(
            Jacobi(cell_lo[-1], cell_lo[-1] + h, 0.0, edge_exponent, float(cell_mass[-1]))
        )

    logger.debug(f"Jacobi 逼近: {len(pieces)} 个分支, 网格步长 {h:.3e}")
    return validate(Measure(Domain.REAL, (), tuple(components)))
