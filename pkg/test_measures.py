#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测度、加载器与数值工具测试
"""

import json
import math

import numpy as np
import pytest

from test_framework import (
    BERNOULLI,
    CAUCHY,
    SEMICIRCLE,
    TestEnvironment,
    TestSuite,
    make_measure,
    test_main,
)


def test_validate_normalizes():
    """测试校验与归一化"""
    from freesupp.core.measures import Atom, Domain, Measure, validate

    m = validate(Measure(Domain.REAL, (Atom(1.0, 0.5000004), Atom(-1.0, 0.5))))
    assert abs(m.total_mass() - 1.0) < 1e-15, "质量应被缩放到 1"
    assert [a.position for a in m.atoms] == [-1.0, 1.0], "原子应按位置排序"

    print("✅ 校验与归一化测试通过")


def test_validate_rejects():
    """测试非法测度"""
    from freesupp.core.errors import (
        DomainViolationError,
        MassNotOneError,
        MeasureSpecError,
        NegativeMassError,
    )

    cases = [
        ({"domain": "real", "atoms": [{"x": 0, "m": 0.5}, {"x": 1, "m": 0.4}]}, MassNotOneError),
        ({"domain": "real", "atoms": [{"x": 0, "m": -0.5}, {"x": 1, "m": 1.5}]}, NegativeMassError),
        ({"domain": "halfline", "atoms": [{"x": -1, "m": 1.0}]}, DomainViolationError),
        ({"domain": "circle", "atoms": [{"x": 7.0, "m": 1.0}]}, DomainViolationError),
        ({"domain": "halfline", "ac": [{"family": "uniform", "a": -1, "b": 1}]}, DomainViolationError),
        ({"domain": "real", "ac": [{"family": "nope"}]}, MeasureSpecError),
        ({"domain": "plane", "atoms": [{"x": 0, "m": 1}]}, MeasureSpecError),
        ({"domain": "real", "ac": [{"family": "marchenko_pastur", "ratio": 2.0}]}, DomainViolationError),
    ]
    for data, error in cases:
        with pytest.raises(error):
            make_measure(data)

    print("✅ 非法测度测试通过")


def test_loader_weights_and_files():
    """测试加载器的权重分配与文件读写"""
    from freesupp.core.measures import Semicircle, Uniform
    from freesupp.loaders.measure_loader import load_measure, measure_to_dict, save_measure

    m = make_measure({
        "domain": "real",
        "atoms": [{"x": 5.0, "m": 0.2}],
        "ac": [{"family": "semicircle"}, {"family": "uniform", "a": 0, "b": 1}],
    })
    weights = sorted(c.weight for c in m.ac_components)
    assert np.allclose(weights, [0.4, 0.4]), f"剩余质量应平分: {weights}"
    assert isinstance(m.ac_components[0], Semicircle)
    assert isinstance(m.ac_components[1], Uniform)

    env = TestEnvironment()
    try:
        path = env.temp_dir() / "m.json"
        save_measure(m, path)
        again = load_measure(path)
        before, after = measure_to_dict(m), measure_to_dict(again)
        assert after["domain"] == before["domain"] and after["atoms"][0]["x"] == 5.0
        assert [c["family"] for c in after["ac"]] == [c["family"] for c in before["ac"]]
        assert np.allclose([c["weight"] for c in after["ac"]], [c["weight"] for c in before["ac"]],
                           rtol=1e-14), "保存后重新加载应得到同一测度"

        spec = json.loads(path.read_text(encoding="utf-8"))
        assert spec["domain"] == "real" and len(spec["ac"]) == 2

        from freesupp.core.errors import MeasureSpecError

        with pytest.raises(MeasureSpecError):
            load_measure(path.parent / "missing.json")
        broken = path.parent / "broken.json"
        broken.write_text("{not json", encoding="utf-8")
        with pytest.raises(MeasureSpecError):
            load_measure(broken)
    finally:
        env.cleanup()

    print("✅ 加载器测试通过")


def test_support_components():
    """测试支撑分支的合并"""
    from freesupp.core.measures import support_components

    touching = make_measure({
        "domain": "real",
        "ac": [{"family": "arcsine", "a": 0, "b": 1}, {"family": "uniform", "a": 1, "b": 2}],
    })
    supp = support_components(touching)
    assert supp.intervals == ((0.0, 2.0),), f"相接的区间应合并: {supp.intervals}"

    mixed = make_measure({
        "domain": "real",
        "atoms": [{"x": 5.0, "m": 0.5}],
        "ac": [{"family": "semicircle", "center": 0, "variance": 1}],
    })
    supp = support_components(mixed)
    assert supp.component_count() == 2
    assert supp.isolated_points == (5.0,)
    assert supp.gaps() == [(-math.inf, -2.0), (2.0, 5.0), (5.0, math.inf)]

    print("✅ 支撑分支测试通过")


def test_circle_support_set():
    """测试圆上支撑集的合并与距离"""
    from freesupp.core.measures import Domain, SupportSet, merge_pieces

    merged = merge_pieces([(6.0, 6.5), (0.1, 0.3)], Domain.CIRCLE)
    assert len(merged.intervals) == 1, f"跨过 2π 的弧应合并: {merged.intervals}"
    lo, hi = merged.intervals[0]
    assert abs(lo - 6.0) < 1e-12 and abs(hi - (0.3 + 2 * math.pi)) < 1e-12

    arc = SupportSet(((6.0, 6.5),), (), Domain.CIRCLE)
    d = arc.distance(np.array([0.1, 1.0, 6.2]))
    assert abs(d[0]) < 1e-12, "0.1 在弧 [6.0, 6.5] 内（模 2π）"
    assert abs(d[1] - (1.0 - (6.5 - 2 * math.pi))) < 1e-12
    assert d[2] == 0.0

    full = merge_pieces([(0.0, 2 * math.pi)], Domain.CIRCLE)
    assert full.is_full_circle and full.gaps() == []

    rotated = SupportSet(((0.0, 1.0),), (), Domain.CIRCLE).rotated(6.0)
    assert abs(rotated.intervals[0][0] - 6.0) < 1e-12

    print("✅ 圆上支撑集测试通过")


def test_cdf_quantile():
    """测试分布函数与右连续分位数"""
    from freesupp.core.measures import cdf, quantile

    bern = make_measure(BERNOULLI)
    assert quantile(bern, 0.25) == -1.0
    assert quantile(bern, 0.75) == 1.0
    assert quantile(bern, 0.5) == 1.0, "F(-1) = 1/2 不大于 1/2，分位数应跳到 1"
    assert float(cdf(bern, -1.0)) == 0.5
    assert float(cdf(bern, 0.999)) == 0.5

    semi = make_measure(SEMICIRCLE)
    assert abs(float(cdf(semi, 0.0)) - 0.5) < 1e-12
    levels = np.array([0.1, 0.5, 0.9])
    values = quantile(semi, levels)
    assert np.allclose(cdf(semi, values), levels, atol=1e-10), "分位数与分布函数应互逆"

    cauchy = make_measure(CAUCHY)
    assert abs(quantile(cauchy, 0.75) - 1.0) < 1e-12, "标准 Cauchy 的上四分位数为 1"

    with pytest.raises(ValueError):
        quantile(semi, 1.0)

    print("✅ 分布函数与分位数测试通过")


def test_angular_quantile():
    """测试圆上的角度分位数"""
    from freesupp.core.errors import DomainViolationError
    from freesupp.core.measures import TWO_PI, angular_quantile, cdf, quantile

    m = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 1.0, "b": 2.0}]})
    assert abs(angular_quantile(m, 0.5) - 1.5) < 1e-10
    with pytest.raises(DomainViolationError):
        quantile(m, 0.5)

    # 越过 2π 的弧绕回 [0, b - 2π]
    arc = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 5.5, "b": 6.5}]})
    tail = 6.5 - TWO_PI
    assert abs(cdf(arc, TWO_PI) - 1.0) < 1e-12
    assert abs(cdf(arc, 0.5 * tail) - 0.5 * tail) < 1e-12
    assert abs(cdf(arc, 3.0) - tail) < 1e-12, "弧之间的空隙上分布函数不变"
    assert abs(angular_quantile(arc, 0.1) - 0.1) < 1e-9
    assert abs(angular_quantile(arc, 0.5) - (5.5 + 0.5 - tail)) < 1e-9
    angles = angular_quantile(arc, np.linspace(0.01, 0.99, 50))
    assert np.all((angles >= 0.0) & (angles < TWO_PI))
    on_arc = (angles <= tail + 1e-9) | (angles >= 5.5 - 1e-9)
    assert np.all(on_arc), f"分位数应落在弧上: {angles[~on_arc]}"

    print("✅ 角度分位数测试通过")


def test_moments():
    """测试矩"""
    from freesupp.core.measures import circular_mean, mean, variance

    semi = make_measure({"domain": "real", "ac": [{"family": "semicircle", "center": 1, "variance": 2}]})
    assert abs(mean(semi) - 1.0) < 1e-12
    assert abs(variance(semi) - 2.0) < 1e-10

    bern = make_measure(BERNOULLI)
    assert mean(bern) == 0.0 and variance(bern) == 1.0

    haar = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 0, "b": 2 * math.pi}]})
    assert abs(circular_mean(haar)) < 1e-15, "Haar 测度的一阶矩为 0"

    print("✅ 矩测试通过")


def test_predicates_and_density():
    """测试点质量/Haar 判定与连续部分密度"""
    from freesupp.core.measures import ac_density, is_haar, is_point_mass

    assert is_point_mass(make_measure({"domain": "real", "atoms": [{"x": 2.0, "m": 1.0}]}))
    assert not is_point_mass(make_measure(BERNOULLI))

    haar = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 0, "b": 2 * math.pi}]})
    arc = make_measure({"domain": "circle", "ac": [{"family": "uniform", "a": 0, "b": 1}]})
    assert is_haar(haar) and not is_haar(arc)
    assert not is_haar(make_measure(SEMICIRCLE)), "实轴测度不是 Haar 测度"

    semi = make_measure(SEMICIRCLE)
    assert abs(ac_density(semi, 0.0) - 1.0 / math.pi) < 1e-15
    assert np.all(ac_density(semi, [-3.0, 3.0]) == 0.0)
    assert np.all(ac_density(make_measure(BERNOULLI), [-1.0, 0.0, 1.0]) == 0.0), "原子不计入密度"

    mixed = make_measure({
        "domain": "real",
        "atoms": [{"x": 5.0, "m": 0.5}],
        "ac": [{"family": "uniform", "a": 0.0, "b": 2.0}],
    })
    assert abs(ac_density(mixed, 1.0) - 0.25) < 1e-15, "分量密度按权重缩放"

    print("✅ 判定与密度测试通过")


def test_jacobi_approximate():
    """测试边缘平方根型逼近"""
    from freesupp.core.errors import UnboundedSupportError
    from freesupp.core.measures import jacobi_approximate, quantile, support_components

    bern = make_measure(BERNOULLI)
    eps = 0.1
    approx = jacobi_approximate(bern, eps)
    assert not approx.atoms, "逼近测度不应含原子"
    assert abs(approx.total_mass() - 1.0) < 1e-12
    assert support_components(approx).component_count() == 2, "分支数应保持"
    for s in (0.1, 0.3, 0.7, 0.9):
        gap = abs(quantile(approx, s) - quantile(bern, s))
        assert gap < eps, f"s={s} 处分位数相差 {gap}"

    semi = make_measure(SEMICIRCLE)
    smooth = jacobi_approximate(semi, 0.05)
    lo, hi = support_components(smooth).hull()
    assert -2.05 <= lo <= -1.99 and 1.99 <= hi <= 2.05, f"外包区间: {(lo, hi)}"

    with pytest.raises(UnboundedSupportError):
        jacobi_approximate(make_measure(CAUCHY), 0.1)
    with pytest.raises(ValueError):
        jacobi_approximate(bern, 0.0)

    print("✅ Jacobi 型逼近测试通过")


def test_numerics():
    """测试二分、求根、求积与外推"""
    from freesupp.utils.numerics import (
        bisect_monotone,
        gauss_jacobi,
        gauss_legendre,
        refine_root,
        richardson,
    )

    roots = bisect_monotone(lambda t: t**3, np.array([1.0, 8.0]), 0.0, 10.0)
    assert np.allclose(roots, [1.0, 2.0], rtol=1e-14)
    down = bisect_monotone(lambda t: -t, np.array([-3.0]), 0.0, 10.0, increasing=False)
    assert abs(down[0] - 3.0) < 1e-13

    assert abs(refine_root(math.cos, 0.0, 3.0) - math.pi / 2) < 1e-13
    with pytest.raises(ValueError):
        refine_root(lambda t: t * t + 1.0, -1.0, 1.0)

    x, w = gauss_legendre(0.0, 1.0, 8)
    assert abs(np.sum(w * x**2) - 1.0 / 3.0) < 1e-14

    x, w = gauss_jacobi(-2.0, 2.0, 16, 0.5, 0.5)
    assert abs(np.sum(w) - 1.0) < 1e-14
    assert abs(np.sum(w * x**2) - 1.0) < 1e-12, "半圆律方差为 1"

    # f(ε) = 1 + 3ε 在 ε 与 2ε 处的线性外推
    assert abs(richardson(1.0 + 3e-2, 1.0 + 6e-2, 0.5) - 1.0) < 1e-14

    print("✅ 数值工具测试通过")


def create_test_suites():
    measures = TestSuite("测度")
    measures.add_test("校验与归一化", test_validate_normalizes)
    measures.add_test("非法测度", test_validate_rejects)
    measures.add_test("加载器", test_loader_weights_and_files)
    measures.add_test("支撑分支", test_support_components)
    measures.add_test("圆上支撑集", test_circle_support_set)
    measures.add_test("分布函数与分位数", test_cdf_quantile)
    measures.add_test("角度分位数", test_angular_quantile)
    measures.add_test("矩", test_moments)
    measures.add_test("判定与密度", test_predicates_and_density)
    measures.add_test("Jacobi 型逼近", test_jacobi_approximate)

    numerics = TestSuite("数值工具")
    numerics.add_test("二分与求根", test_numerics)
    return [measures, numerics]


TEST_MAP = {
    "validate": ("校验与归一化", test_validate_normalizes),
    "reject": ("非法测度", test_validate_rejects),
    "loader": ("加载器", test_loader_weights_and_files),
    "components": ("支撑分支", test_support_components),
    "circle": ("圆上支撑集", test_circle_support_set),
    "quantile": ("分布函数与分位数", test_cdf_quantile),
    "angular": ("角度分位数", test_angular_quantile),
    "moments": ("矩", test_moments),
    "predicates": ("判定与密度", test_predicates_and_density),
    "jacobi": ("Jacobi 型逼近", test_jacobi_approximate),
    "numerics": ("数值工具", test_numerics),
}


if __name__ == "__main__":
    test_main("freesupp 测度测试", create_test_suites, TEST_MAP)
