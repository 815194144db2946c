#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测度描述文件加载器

JSON 格式:
    {"domain": "real" | "halfline" | "circle",
     "atoms": [{"x": ..., "m": ...}],
     "ac": [{"family": "semicircle", "center": 0, "variance": 1}, ...]}

ac 分量可带 "weight"（分量质量）；省略时平分原子之外的剩余质量。
"""

import json
import logging
from pathlib import Path

from ..core.errors import MeasureSpecError
from ..core.measures import (
    Arcsine,
    Atom,
    Cauchy,
    Domain,
    Histogram,
    Jacobi,
    MarchenkoPastur,
    Measure,
    Semicircle,
    Table,
    Uniform,
    validate,
)
from ..utils.fs import FileSystemUtils

logger = logging.getLogger(__name__)

FAMILY_ALIASES = {
    "mp": "marchenko_pastur",
    "marchenko-pastur": "marchenko_pastur",
    "marchenkopastur": "marchenko_pastur",
}


def _number(entry, key, default=None):
    value = entry.get(key, default)
    if value is None:
        raise MeasureSpecError(f"分量 {entry.get('family')} 缺少字段 '{key}'")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise MeasureSpecError(f"字段 '{key}' 不是数值: {value!r}")


def _numbers(entry, key):
    values = entry.get(key)
    if not isinstance(values, list) or not values:
        raise MeasureSpecError(f"分量 {entry.get('family')} 的字段 '{key}' 必须是非空列表")
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise MeasureSpecError(f"字段 '{key}' 含有非数值元素")


def _build_component(entry, weight):
    family = str(entry.get("family", "")).lower()
    family = FAMILY_ALIASES.get(family, family)

    if family == "semicircle":
        return Semicircle(_number(entry, "center", 0.0), _number(entry, "variance", 1.0), weight)
    if family == "arcsine":
        return Arcsine(_number(entry, "a"), _number(entry, "b"), weight)
    if family == "marchenko_pastur":
        ratio = entry.get("ratio", entry.get("lambda", 1.0))
        return MarchenkoPastur(_number({"ratio": ratio}, "ratio"), weight)
    if family == "cauchy":
        return Cauchy(_number(entry, "location", 0.0), _number(entry, "scale", 1.0), weight)
    if family == "uniform":
        return Uniform(_number(entry, "a"), _number(entry, "b"), weight)
    if family == "jacobi":
        comp = Jacobi(
            _number(entry, "a"), _number(entry, "b"),
            _number(entry, "alpha", 0.0), _number(entry, "beta", 0.0), weight,
        )
        if "normalizer" in entry:
            given = _number(entry, "normalizer")
            if abs(given - comp.normalizer) > 1e-9 * max(1.0, abs(comp.normalizer)):
                logger.warning(
                    f"jacobi normalizer {given} 与计算值 {comp.normalizer} 不一致，使用计算值"
                )
        return comp
    if family == "table":
        return Table(
            _number(entry, "a"), _number(entry, "b"),
            _numbers(entry, "nodes"), _numbers(entry, "weights"), weight,
        )
    if family == "histogram":
        return Histogram(_numbers(entry, "edges"), _numbers(entry, "masses"), weight)

    raise MeasureSpecError(f"未知的分布族: {entry.get('family')!r}")


def measure_from_dict(data) -> Measure:
    """由字典构造并校验测度

    Args:
        data: 解析后的 JSON 对象

    Returns:
        Measure: 校验后的测度

    Raises:
        MeasureSpecError: 字段缺失或格式错误
        MeasureError: 校验失败
    """
    if not isinstance(data, dict):
        raise MeasureSpecError("测度描述必须是 JSON 对象")

    try:
        domain = Domain(str(data.get("domain", "real")).lower())
    except ValueError:
        raise MeasureSpecError(f"未知的域: {data.get('domain')!r}")

    atoms = []
    for entry in data.get("atoms", []) or []:
        if not isinstance(entry, dict):
            raise MeasureSpecError(f"原子必须是 {{'x', 'm'}} 对象: {entry!r}")
        atoms.append(Atom(_number(entry, "x"), _number(entry, "m")))

    ac_entries = data.get("ac", []) or []
    if not all(isinstance(e, dict) for e in ac_entries):
        raise MeasureSpecError("ac 分量必须是对象")

    atom_mass = sum(a.mass for a in atoms)
    unweighted = [e for e in ac_entries if "weight" not in e]
    given = sum(_number(e, "weight") for e in ac_entries if "weight" in e)
    share = (1.0 - atom_mass - given) / len(unweighted) if unweighted else 0.0

    components = []
    for entry in ac_entries:
        weight = _number(entry, "weight") if "weight" in entry else share
        components.append(_build_component(entry, weight))

    return validate(Measure(domain, tuple(atoms), tuple(components)))


def measure_to_dict(m: Measure):
    """测度转为描述字典（与 measure_from_dict 互逆）"""
    return {
        "domain": m.domain.value,
        "atoms": [{"x": a.position, "m": a.mass} for a in m.atoms],
        "ac": [c.to_spec() for c in m.ac_components],
    }


def load_measure(file_path) -> Measure:
    """从 JSON 文件加载测度

    Args:
        file_path: 描述文件路径

    Returns:
        Measure: 校验后的测度

    Raises:
        MeasureSpecError: 文件不存在或不是合法 JSON
    """
    path = Path(file_path)
    if not path.exists():
        raise MeasureSpecError(f"测度文件不存在: {file_path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise MeasureSpecError(f"无法解析测度文件 {file_path}: {e}")

    measure = measure_from_dict(data)
    logger.debug(
        f"加载测度 {path.name}: {measure.domain.value}, "
        f"{len(measure.atoms)} 个原子, {len(measure.ac_components)} 个连续分量"
    )
    return measure


def save_measure(m: Measure, file_path):
    """把测度写成 JSON 描述文件"""
    return FileSystemUtils.write_json(file_path, measure_to_dict(m))
