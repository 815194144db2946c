#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
卷积支撑测试
"""

import math

import numpy as np
import pytest

from test_framework import (
    BERNOULLI,
    HAAR,
    PROJECTION,
    SEMICIRCLE,
    SYMMETRY,
    TestSuite,
    make_measure,
    point_mass,
    test_main,
)


def _close(a, b, tol=1e-6):
    return abs(a - b) <= tol


def test_bernoulli_square():
    """测试 ±1 两点分布自卷积的支撑为 [-2, 2]"""
    from freesupp.solvers.support import support_additive

    bern = make_measure(BERNOULLI)
    result = support_additive(bern, bern)
    support = result.support
    assert support.component_count() == 1, f"应为一个分支: {support}"
    lo, hi = support.hull()
    assert _close(lo, -2.0) and _close(hi, 2.0), f"支撑应为 [-2, 2]: {support}"

    d = result.diagnostics
    assert d["n1"] == 2 and d["n2"] == 2
    assert d["bound"] == 7
    assert result.bound_satisfied
    for gap in result.gaps:
        lo, hi = gap.interval
        assert hi <= -2.0 + 1e-6 or lo >= 2.0 - 1e-6, f"[-2, 2] 内不应有间隙: {gap}"

    # 交叉曲线满足 t₁ = -1/t₂，判据恒为 0
    assert any(c.comp1.interval != c.comp2.interval for c in result.curves), "应追踪到交叉曲线"

    print("✅ 两点分布自卷积支撑测试通过")


def test_semicircle_edges():
    """测试半圆律自卷积：方差相加"""
    from freesupp.solvers.support import support_additive

    semi = make_measure(SEMICIRCLE)
    support = support_additive(semi, semi).support
    assert support.component_count() == 1
    edge = 2.0 * math.sqrt(2.0)
    lo, hi = support.hull()
    assert _close(lo, -edge) and _close(hi, edge), f"边缘应为 ±2√2: {support}"

    print("✅ 半圆律边缘测试通过")


def test_two_components():
    """测试小方差半圆律不足以填满两原子之间的间隙"""
    from freesupp.solvers.support import support_additive

    bern = make_measure(BERNOULLI)
    narrow = make_measure({"domain": "real", "ac": [{"family": "semicircle", "center": 0, "variance": 0.1}]})
    result = support_additive(bern, narrow)
    support = result.support

    assert support.component_count() == 2, f"应为两个分支: {support}"
    assert not support.contains(0.0), "0 应在间隙中"
    assert support.contains(1.0) and support.contains(-1.0)
    lo, hi = support.hull()
    assert _close(lo, -hi), f"支撑应关于 0 对称: {support}"
    assert result.diagnostics["bound"] == 3 and result.bound_satisfied

    print("✅ 两分支支撑测试通过")


def test_multiplicative_supports():
    """测试 ℝ₊ 与 𝕋 上的乘法卷积支撑"""
    from freesupp.solvers.support import support_mult_circle, support_mult_halfline

    proj = make_measure(PROJECTION)
    support = support_mult_halfline(proj, proj).support
    assert support.component_count() == 1, f"应为一个分支: {support}"
    lo, hi = support.hull()
    assert _close(lo, 0.0) and _close(hi, 1.0), f"支撑应为 [0, 1]: {support}"

    sym = make_measure(SYMMETRY)
    result = support_mult_circle(sym, sym)
    assert result.support.is_full_circle, f"应为整个圆周: {result.support}"
    assert result.diagnostics["e_components"] == 4
    assert result.diagnostics["e_bound"] == 4
    assert result.bound_satisfied

    haar = make_measure(HAAR)
    result = support_mult_circle(haar, sym)
    assert result.support.is_full_circle and result.diagnostics["haar"]

    print("✅ 乘法卷积支撑测试通过")


def test_halfline_two_atoms():
    """测试 ½(δ₁ + δ₃) 在 ℝ₊ 上的自卷积支撑为 [1, 9]"""
    from freesupp.solvers.support import support_mult_halfline

    two = make_measure({"domain": "halfline", "atoms": [{"x": 1.0, "m": 0.5}, {"x": 3.0, "m": 0.5}]})
    result = support_mult_halfline(two, two)
    support = result.support
    assert support.component_count() == 1, f"应为一个分支: {support}"
    lo, hi = support.hull()
    assert _close(lo, 1.0) and _close(hi, 9.0), f"支撑应为 [1, 9]: {support}"
    # 交叉曲线的像恒为 3
    assert support.contains(3.0)
    assert result.bound_satisfied

    print("✅ ℝ₊ 两原子自卷积测试通过")


def test_point_mass_shortcuts():
    """测试点质量输入的平移、伸缩与旋转"""
    from freesupp.solvers.support import support_additive, support_mult_circle, support_mult_halfline

    shifted = support_additive(point_mass(3.0), make_measure(SEMICIRCLE))
    assert shifted.diagnostics["shortcut"]
    assert shifted.support.intervals == ((1.0, 5.0),)

    uniform = make_measure({"domain": "halfline", "ac": [{"family": "uniform", "a": 1.0, "b": 2.0}]})
    scaled = support_mult_halfline(uniform, point_mass(2.0, "halfline"))
    assert scaled.support.intervals == ((2.0, 4.0),)

    arc = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 0.0, "b": 1.0}]})
    rotated = support_mult_circle(point_mass(math.pi / 2, "circle"), arc).support
    assert len(rotated.intervals) == 1
    lo, hi = rotated.intervals[0]
    assert _close(lo, math.pi / 2, 1e-12) and _close(hi, math.pi / 2 + 1.0, 1e-12)

    print("✅ 点质量捷径测试通过")


def test_pair_criterion():
    """测试 ⊞ 配对判据与间隙点"""
    from freesupp.core.errors import CriterionFailedError, PoleOfFError
    from freesupp.solvers.support import gap_point_from_pair_additive, pair_criterion_additive

    bern = make_measure(BERNOULLI)

    # F(t) = t - 1/t，(F′ - 1)² = 1/t⁴
    matches, value = pair_criterion_additive(bern, bern, 3.0, 3.0)
    assert matches and _close(value, 1.0 / 81.0 - 1.0, 1e-12)

    # ω² - tω + 1 = 0 在 ω = 3 时 t = 10/3
    t = gap_point_from_pair_additive(bern, bern, 3.0, 3.0)
    assert _close(t, 10.0 / 3.0, 1e-12), f"间隙点应为 10/3: {t}"

    with pytest.raises(CriterionFailedError):
        gap_point_from_pair_additive(bern, bern, 0.5, 0.5)
    with pytest.raises(CriterionFailedError):
        gap_point_from_pair_additive(bern, bern, 3.0, 4.0)
    with pytest.raises(PoleOfFError):
        pair_criterion_additive(bern, bern, 0.0, 3.0)

    print("✅ 配对判据测试通过")


def test_round_trip():
    """测试间隙点经边界从属函数往返"""
    from freesupp.solvers.support import support_additive

    bern = make_measure(BERNOULLI)
    result = support_additive(bern, bern)
    checks = result.round_trip(bern, bern)
    assert checks, "至少应检查一个间隙点"
    for check in checks:
        assert check.ok, f"往返失败: {check}"
        assert check.criterion < 0
        assert not result.support.contains(check.point)

    print("✅ 往返检查测试通过")


def test_round_trip_degenerate():
    """测试边界 ω 使 G 为 0 时往返检查返回失败而不抛异常"""
    from types import SimpleNamespace
    from unittest import mock

    from freesupp.solvers import support as support_module
    from freesupp.solvers.subordination import SubordinationConfig

    bern = make_measure(BERNOULLI)
    cfg = SubordinationConfig.from_config()
    # ±1 两点分布在 ω = i 处 Re ω = 0，G(0) = 0
    boundary = SimpleNamespace(omega1=1j, omega2=1j)
    with mock.patch.object(support_module, "omega_additive_boundary", return_value=boundary):
        check = support_module._round_trip_point("add", bern, bern, 0.0, cfg, 1e-6)
    assert not check.ok
    assert math.isinf(check.error) and math.isnan(check.criterion)
    assert check.point == 0.0 and check.t1 == 1j

    print("✅ 退化往返检查测试通过")


def _random_connected(rng):
    kind = int(rng.integers(3))
    if kind == 0:
        center = float(rng.uniform(-2.0, 2.0))
        return {"domain": "real", "ac": [{"family": "semicircle", "center": center,
                                          "variance": float(rng.uniform(0.05, 2.0))}]}
    a = float(rng.uniform(-3.0, 1.0))
    b = a + float(rng.uniform(0.2, 3.0))
    family = "uniform" if kind == 1 else "arcsine"
    return {"domain": "real", "ac": [{"family": family, "a": a, "b": b}]}


def _random_atomic(rng):
    n = int(rng.integers(1, 4))
    xs = np.sort(rng.choice(np.arange(-6, 7), size=n, replace=False) * 0.5 + rng.uniform(-0.1, 0.1, n))
    ms = rng.dirichlet(np.ones(n))
    ms[-1] = 1.0 - ms[:-1].sum()
    return {"domain": "real", "atoms": [{"x": float(x), "m": float(m)} for x, m in zip(xs, ms)]}


@pytest.mark.slow
def test_random_connected_pairs():
    """测试 50 对随机连通支撑测度的 ⊞ 支撑连通"""
    from freesupp.solvers.support import support_additive

    rng = np.random.default_rng(20240611)
    for i in range(50):
        d1, d2 = _random_connected(rng), _random_connected(rng)
        support = support_additive(make_measure(d1), make_measure(d2)).support
        assert support.component_count() == 1, f"第 {i} 对应连通: {d1} ⊞ {d2} -> {support}"

    print("✅ 随机连通测度测试通过")


@pytest.mark.slow
def test_random_atomic_pairs():
    """测试 50 对随机原子测度满足 n ≤ 2n₁n₂ - 1"""
    from freesupp.solvers.support import support_additive

    rng = np.random.default_rng(20240612)
    for i in range(50):
        d1, d2 = _random_atomic(rng), _random_atomic(rng)
        result = support_additive(make_measure(d1), make_measure(d2))
        assert result.bound_satisfied, (
            f"第 {i} 对超出上界: {d1} ⊞ {d2} -> {result.support}, "
            f"bound={result.diagnostics.get('bound')}"
        )

    print("✅ 随机原子测度上界测试通过")


def test_pair_curves():
    """测试配对曲线的参数化"""
    from freesupp.solvers.support import support_additive

    bern = make_measure(BERNOULLI)
    result = support_additive(bern, bern)
    assert result.curves, "应追踪到配对曲线"

    diagonal = [c for c in result.curves if c.comp1.interval == c.comp2.interval]
    assert diagonal, "相同测度时应有对角曲线"
    curve = diagonal[0]
    t1 = curve.samples["t1"]
    mid = float(t1[len(t1) // 2])
    assert abs(curve.t2_of_t1(mid) - mid) <= 1e-6 * (1.0 + abs(mid)), "对角曲线上 t₂ = t₁"

    lo, hi = curve.t1_range
    assert lo <= mid <= hi
    v, crit = curve.samples["v"], curve.samples["criterion"]
    for seg_lo, seg_hi in curve.segments:
        inside = (v > seg_lo) & (v < seg_hi)
        # 舍入误差之外的点才有确定的符号
        determined = inside & (np.abs(crit) > curve.samples["error"])
        assert np.all(crit[determined] < 0), "段内判据为负"
        if np.any(determined):
            again = curve.criterion(v[determined][:3])
            assert np.all(again < 0)

    print("✅ 配对曲线测试通过")


def test_value_grid_and_bound():
    """测试参数网格与分支数上界检查"""
    from freesupp.core.measures import Domain, SupportSet
    from freesupp.solvers.support import SupportResult, component_count_check, value_grid

    grid = value_grid(0.0, 1.0, 32)
    assert np.all((grid > 0.0) & (grid < 1.0))
    assert np.all(np.diff(grid) > 0), "网格应严格递增"
    assert grid[0] < 1e-11 and grid[-1] > 1.0 - 1e-11, "两端应加密"

    wide = value_grid(-math.inf, math.inf, 32)
    assert wide[0] <= -1e12 and wide[-1] >= 1e12
    half = value_grid(1.0, math.inf, 16)
    assert np.all(half > 1.0)

    three = SupportSet(((0.0, 1.0), (2.0, 3.0), (4.0, 5.0)), (), Domain.REAL)
    over = SupportResult("add", three, diagnostics={"n": 3, "n1": 1, "n2": 1})
    assert not component_count_check(over), "n ≤ 2n₁n₂ - 1 不成立"
    assert component_count_check(SupportResult("mult-r", three, diagnostics={"n": 3, "n1": 1, "n2": 1}))

    print("✅ 参数网格与上界测试通过")


def create_test_suites():
    additive = TestSuite("⊞ 支撑")
    additive.add_test("两点分布自卷积", test_bernoulli_square)
    additive.add_test("半圆律边缘", test_semicircle_edges)
    additive.add_test("两分支", test_two_components)

    mult = TestSuite("⊠ 支撑")
    mult.add_test("ℝ₊ 与 𝕋", test_multiplicative_supports)
    mult.add_test("点质量捷径", test_point_mass_shortcuts)
    mult.add_test("ℝ₊ 两原子", test_halfline_two_atoms)

    curves = TestSuite("配对曲线")
    curves.add_test("配对判据", test_pair_criterion)
    curves.add_test("往返检查", test_round_trip)
    curves.add_test("退化往返", test_round_trip_degenerate)
    curves.add_test("曲线参数化", test_pair_curves)
    curves.add_test("网格与上界", test_value_grid_and_bound)
    random_pairs = TestSuite("随机测度对")
    random_pairs.add_test("随机连通", test_random_connected_pairs)
    random_pairs.add_test("随机原子", test_random_atomic_pairs)
    return [additive, mult, curves, random_pairs]


TEST_MAP = {
    "bernoulli": ("两点分布自卷积", test_bernoulli_square),
    "semicircle": ("半圆律边缘", test_semicircle_edges),
    "two": ("两分支", test_two_components),
    "mult": ("ℝ₊ 与 𝕋", test_multiplicative_supports),
    "shortcut": ("点质量捷径", test_point_mass_shortcuts),
    "halfline": ("ℝ₊ 两原子", test_halfline_two_atoms),
    "criterion": ("配对判据", test_pair_criterion),
    "roundtrip": ("往返检查", test_round_trip),
    "degenerate": ("退化往返", test_round_trip_degenerate),
    "curves": ("曲线参数化", test_pair_curves),
    "grid": ("网格与上界", test_value_grid_and_bound),
    "random_connected": ("随机连通", test_random_connected_pairs),
    "random_atomic": ("随机原子", test_random_atomic_pairs),
}


if __name__ == "__main__":
    test_main("freesupp 支撑测试", create_test_suites, TEST_MAP)
