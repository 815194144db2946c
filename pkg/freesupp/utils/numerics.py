#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
数值工具

区间二分（向量化）、单变量求根、Gauss 求积节点和 Richardson 外推。
所有支撑计算的单调反演都走这里。
"""

from functools import lru_cache

import numpy as np
from scipy import optimize, special

_EPS = np.finfo(float).eps


def bisect_monotone(fn, targets, lo, hi, increasing=True, max_iter=200):
    """向量化二分：求 fn(t) = target，fn 在 (lo, hi) 上严格单调

    fn 只在开区间内部求值，端点可以是奇点。

    Args:
        fn: 向量化函数，接受并返回同形状数组
        targets: 目标值数组
        lo: 下端点（标量或数组，必须有限）
        hi: 上端点（标量或数组，必须有限）
        increasing: fn 是否递增
        max_iter: 最大二分次数

    Returns:
        np.ndarray: 解
    """
    targets = np.asarray(targets, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), targets.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), targets.shape).copy()

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        values = fn(mid)
        if increasing:
            go_right = values < targets
        else:
            go_right = values > targets
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)

        width = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        if np.all(width <= 4.0 * _EPS * scale + 1e-300):
            break

    return 0.5 * (lo + hi)


def generalized_inverse(cdf, levels, lo, hi, max_iter=200):
    """右连续广义逆 inf{t : cdf(t) > s}

    Args:
        cdf: 向量化的非降函数
        levels: s 值数组
        lo: 满足 cdf(lo) <= s 的下界
        hi: 满足 cdf(hi) > s 的上界
        max_iter: 最大二分次数

    Returns:
        np.ndarray: 广义逆的值
    """
    levels = np.asarray(levels, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), levels.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), levels.shape).copy()

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        above = cdf(mid) > levels
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)

        width = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        if np.all(width <= 4.0 * _EPS * scale + 1e-300):
            break

    return hi


def refine_root(fn, a, b, xtol=1e-14, max_iter=200):
    """在变号区间 [a, b] 上精化根

    Args:
        fn: 标量函数
        a: 区间左端
        b: 区间右端
        xtol: 绝对容差
        max_iter: 最大迭代次数

    Returns:
        float: 根

    Raises:
        ValueError: 端点同号
    """
    fa = fn(a)
    fb = fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError(f"端点同号: f({a})={fa}, f({b})={fb}")
    return optimize.brentq(fn, a, b, xtol=xtol, rtol=4 * _EPS, maxiter=max_iter)


@lru_cache(maxsize=64)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=64)
def _jacobi(n, alpha, beta):
    return special.roots_jacobi(n, alpha, beta)


def gauss_legendre(a, b, n):
    """[a, b] 上的 Gauss-Legendre 节点与权重（权重和为 b - a）

    Args:
        a: 左端点
        b: 右端点
        n: 节点数

    Returns:
        tuple: (nodes, weights)
    """
    x, w = _legendre(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gauss_jacobi(a, b, n, alpha, beta):
    """权函数 (t-a)^alpha (b-t)^beta 的 Gauss-Jacobi 节点，权重归一化为 1

    Args:
        a: 左端点
        b: 右端点
        n: 节点数
        alpha: 左端指数
        beta: 右端指数

    Returns:
        tuple: (nodes, weights)
    """
    # roots_jacobi 的权函数是 (1-x)^p (1+x)^q，左端 (1+x) 对应 alpha
    x, w = _jacobi(int(n), float(beta), float(alpha))
    nodes = a + 0.5 * (b - a) * (x + 1.0)
    return nodes, w / np.sum(w)


def richardson(value, previous, ratio):
    """线性外推到 ε → 0

    value 在 ε 处求得，previous 在 ε/ratio 处求得。

    Args:
        value: 最小 ε 处的值
        previous: 上一个 ε 处的值
        ratio: ε 序列的公比 (0 < ratio < 1)

    Returns:
        外推值
    """
    return (value - ratio * previous) / (1.0 - ratio)
