#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
随机矩阵对照

用 Haar 酉矩阵共轭的确定性对角阵逼近自由卷积：

    ⊞:      D₁ + U D₂ U*
    ⊠ ℝ₊:   D₂^{1/2} U D₁ U* D₂^{1/2}
    ⊠ 𝕋:    D₁ V D₂ V*（特征值取角度）

对角元取各测度在 (i - 1/2)/N 处的分位数，只有共轭是随机的。
每次试验的随机数流由 SeedSequence(seed).spawn 派生，结果与调度无关。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from ..config import get_config
from ..core.errors import NonHermitianFalloutError
from ..core.measures import (
    TWO_PI,
    Domain,
    Measure,
    SupportSet,
    angular_quantile,
    merge_pieces,
    quantile,
)
from ..utils.fs import FileSystemUtils
from ..utils.logger import log_elapsed

logger = logging.getLogger(__name__)

KINDS = ("add", "mult-r", "mult-t")
RESIDUAL_TOL = 1e-8
COVER_LENGTH = 0.2
EIGEN_CSV_HEADER = ["trial", "index", "value"]


@dataclass(frozen=True)
class OracleConfig:
    """Monte Carlo 参数"""

    matrix_size: int = 2000
    trials: int = 20
    seed: int = 0
    gap_threshold: float = 0.05
    bins: int = 100
    workers: int = 1

    def __post_init__(self):
        if self.matrix_size < 2:
            raise ValueError(f"matrix_size 至少为 2: {self.matrix_size}")
        if self.trials < 1:
            raise ValueError(f"trials 至少为 1: {self.trials}")
        if self.gap_threshold <= 0:
            raise ValueError(f"gap_threshold 必须为正: {self.gap_threshold}")
        if self.bins < 1 or self.workers < 1:
            raise ValueError("bins 与 workers 至少为 1")

    @classmethod
    def from_config(cls, config=None):
        config = config or get_config()
        section = config.get("oracle")
        return cls(
            matrix_size=int(section["matrix_size"]),
            trials=int(section["trials"]),
            seed=int(section["seed"]),
            gap_threshold=float(section["gap_threshold"]),
            bins=int(section["bins"]),
            workers=int(section["workers"]),
        )


@dataclass
class EmpiricalSpectrum:
    """汇总后的特征值样本

    eigenvalues 为所有试验合并后排序的特征值（𝕋 上为 [0, 2π) 内的角度），
    per_trial 按试验保存，供导出 CSV。
    """

    kind: str
    eigenvalues: np.ndarray
    estimated_support: SupportSet
    histogram: Tuple[np.ndarray, np.ndarray]
    per_trial: np.ndarray = field(repr=False, default=None)

    @property
    def size(self):
        return int(self.eigenvalues.size)

    def summary(self):
        ev = self.eigenvalues
        return {
            "kind": self.kind,
            "samples": self.size,
            "min": float(ev.min()),
            "max": float(ev.max()),
            "mean": float(ev.mean()),
            "variance": float(ev.var()),
            "estimated_support": self.estimated_support.to_dict(),
        }


@dataclass
class OracleComparison:
    """对照结果

    max_deviation 为特征值到计算支撑的最大距离；
    uncovered 为长度超过 0.2 却不含任何特征值的支撑区间。
    """

    max_deviation: float
    uncovered: List[Tuple[float, float]]
    threshold: float

    @property
    def agrees(self):
        return self.max_deviation < self.threshold and not self.uncovered

    def to_dict(self):
        return {
            "max_deviation": self.max_deviation,
            "uncovered": [list(i) for i in self.uncovered],
            "threshold": self.threshold,
            "agrees": self.agrees,
        }


def sample_haar_unitary(n: int, seed=None):
    """Haar 分布的 n×n 酉矩阵

    对复 Gauss 矩阵做 QR 分解，再把 R 对角元的相位乘回 Q 的各列，
    使分解唯一（R 对角元为正）。

    Args:
        n: 矩阵阶数
        seed: 整数种子、SeedSequence 或 Generator

    Returns:
        np.ndarray: 酉矩阵
    """
    if n < 1:
        raise ValueError(f"矩阵阶数至少为 1: {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _diagonal(m: Measure, n: int):
    levels = (np.arange(n) + 0.5) / n
    if m.domain == Domain.CIRCLE:
        return np.exp(1j * angular_quantile(m, levels))
    return np.asarray(quantile(m, levels), dtype=float)


def _hermitian_eigenvalues(h):
    h = 0.5 * (h + h.conj().T)
    values, vectors = linalg.eigh(h)
    residual = float(np.max(np.abs(h @ vectors - vectors * values)))
    scale = 1.0 + float(np.max(np.abs(values)))
    if residual > RESIDUAL_TOL * scale:
        raise NonHermitianFalloutError(f"特征分解残差过大: {residual:.3e}")
    return values


def _unitary_angles(a):
    t, z = linalg.schur(a, output="complex")
    residual = float(np.max(np.abs(a @ z - z @ t)))
    if residual > RESIDUAL_TOL:
        raise NonHermitianFalloutError(f"Schur 分解残差过大: {residual:.3e}")
    return np.mod(np.angle(np.diag(t)), TWO_PI)


def _trial(kind, d1, d2, seed):
    n = d1.size
    u = sample_haar_unitary(n, np.random.default_rng(seed))
    if kind == "add":
        values = _hermitian_eigenvalues(np.diag(d1) + (u * d2) @ u.conj().T)
    elif kind == "mult-r":
        root = np.sqrt(np.clip(d2, 0.0, None))
        inner = (u * d1) @ u.conj().T
        values = np.clip(_hermitian_eigenvalues(root[:, None] * inner * root[None, :]), 0.0, None)
    else:
        values = _unitary_angles(d1[:, None] * ((u * d2) @ u.conj().T))
    return np.sort(values)


def estimate_support(eigenvalues, gap_threshold: float, domain=Domain.REAL) -> SupportSet:
    """按相邻间距切分排序后的样本；间距超过 gap_threshold 处视为间隙"""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    if ev.size == 0:
        return SupportSet((), (), domain)
    cuts = np.nonzero(np.diff(ev) > gap_threshold)[0]
    starts = np.concatenate([[0], cuts + 1])
    ends = np.concatenate([cuts, [ev.size - 1]])
    pieces = [(float(ev[s]), float(ev[e])) for s, e in zip(starts, ends)]

    if domain == Domain.CIRCLE:
        if ev[0] + TWO_PI - ev[-1] <= gap_threshold and len(pieces) > 1:
            first = pieces.pop(0)
            last = pieces.pop()
            pieces.append((last[0], first[1] + TWO_PI))
        elif ev[0] + TWO_PI - ev[-1] <= gap_threshold:
            return SupportSet(((0.0, TWO_PI),), (), domain)
    return merge_pieces(pieces, domain, tol=0.0)


def empirical_spectrum(kind: str, m1: Measure, m2: Measure,
                       cfg: Optional[OracleConfig] = None) -> EmpiricalSpectrum:
    """随机矩阵模型的合并谱

    Args:
        kind: "add"、"mult-r" 或 "mult-t"
        m1: 第一个测度
        m2: 第二个测度
        cfg: Monte Carlo 参数

    Returns:
        EmpiricalSpectrum: 合并后的特征值、估计支撑与直方图

    Raises:
        NonHermitianFalloutError: 特征分解残差超过 1e-8
    """
    if kind not in KINDS:
        raise ValueError(f"未知的卷积类型: {kind}")
    cfg = cfg or OracleConfig.from_config()
    n = cfg.matrix_size
    d1, d2 = _diagonal(m1, n), _diagonal(m2, n)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)

    def run(i):
        logger.debug(f"试验 {i + 1}/{cfg.trials} (N={n})")
        return _trial(kind, d1, d2, seeds[i])

    with log_elapsed(logger, f"{cfg.trials} 次试验", logging.INFO):
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                per_trial = list(pool.map(run, range(cfg.trials)))
        else:
            per_trial = [run(i) for i in range(cfg.trials)]

    per_trial = np.vstack(per_trial)
    pooled = np.sort(per_trial.ravel())
    domain = Domain.CIRCLE if kind == "mult-t" else (
        Domain.HALFLINE if kind == "mult-r" else Domain.REAL
    )
    support = estimate_support(pooled, cfg.gap_threshold, domain)
    counts, edges = np.histogram(pooled, bins=cfg.bins)
    logger.info(
        f"随机矩阵 {kind}: {cfg.trials} 次试验 × N={n}, 估计支撑 {support.component_count()} 个分支"
    )
    return EmpiricalSpectrum(kind, pooled, support, (edges, counts), per_trial)


def compare_with_support(spectrum: EmpiricalSpectrum, support: SupportSet,
                         threshold: Optional[float] = None) -> OracleComparison:
    """比较样本与计算得到的支撑

    Args:
        spectrum: 随机矩阵样本
        support: 计算得到的支撑
        threshold: 允许偏差，None 时取配置中的 gap_threshold

    Returns:
        OracleComparison: 最大偏差与未覆盖区间
    """
    if threshold is None:
        threshold = float(get_config().get("oracle", "gap_threshold", 0.05))
    ev = spectrum.eigenvalues
    deviation = float(np.max(support.distance(ev))) if ev.size else 0.0

    uncovered = []
    for lo, hi in support.intervals:
        if hi - lo <= COVER_LENGTH:
            continue
        if support.domain == Domain.CIRCLE:
            hit = np.any(np.mod(ev - lo, TWO_PI) <= hi - lo)
        else:
            i = np.searchsorted(ev, lo, side="left")
            hit = i < ev.size and ev[i] <= hi
        if not hit:
            uncovered.append((lo, hi))

    result = OracleComparison(deviation, uncovered, float(threshold))
    logger.info(f"对照: max_deviation={deviation:.4f}, 未覆盖区间 {len(uncovered)} 个")
    return result


def write_eigenvalues_csv(spectrum: EmpiricalSpectrum, file_path):
    """按 trial,index,value 导出各次试验的特征值"""
    rows = [
        [t, i, repr(float(v))]
        for t, values in enumerate(spectrum.per_trial)
        for i, v in enumerate(values)
    ]
    return FileSystemUtils.write_csv(file_path, EIGEN_CSV_HEADER, rows)


def read_eigenvalues_csv(file_path):
    """读取 write_eigenvalues_csv 的输出，返回 (trials, N) 数组"""
    header, rows = FileSystemUtils.read_csv(file_path)
    if header != EIGEN_CSV_HEADER:
        raise ValueError(f"特征值 CSV 表头不符: {header}")
    trials = max(int(r[0]) for r in rows) + 1
    size = max(int(r[1]) for r in rows) + 1
    out = np.full((trials, size), math.nan)
    for r in rows:
        out[int(r[0]), int(r[1])] = float(r[2])
    return out
