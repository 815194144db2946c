#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
freesupp 测试框架

各 test_*.py 共用的测试运行器、临时环境和测度样例，
本文件自身测试配置、异常层次、日志与文件工具。

既可以用 pytest 运行，也可以直接执行：
  python test_framework.py            # 运行本文件的所有测试
  python test_framework.py -t config  # 运行单个测试
"""

import argparse
import contextlib
import io
import json
import logging
import math
import os
import shutil
import sys
import tempfile
import time
import traceback
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent))


# ============================================================================
# 测度样例
# ============================================================================

BERNOULLI = {"domain": "real", "atoms": [{"x": -1.0, "m": 0.5}, {"x": 1.0, "m": 0.5}]}
SEMICIRCLE = {"domain": "real", "ac": [{"family": "semicircle", "center": 0.0, "variance": 1.0}]}
CAUCHY = {"domain": "real", "ac": [{"family": "cauchy", "location": 0.0, "scale": 1.0}]}
PROJECTION = {"domain": "halfline", "atoms": [{"x": 0.0, "m": 0.5}, {"x": 1.0, "m": 0.5}]}
SYMMETRY = {"domain": "circle", "atoms": [{"x": 0.0, "m": 0.5}, {"x": math.pi, "m": 0.5}]}
HAAR = {"domain": "circle", "ac": [{"family": "uniform", "a": 0.0, "b": 2.0 * math.pi}]}


def make_measure(data):
    """由描述字典构造测度"""
    from freesupp.loaders.measure_loader import measure_from_dict

    return measure_from_dict(data)


def point_mass(x, domain="real"):
    return make_measure({"domain": domain, "atoms": [{"x": x, "m": 1.0}]})


# ============================================================================
# 运行器
# ============================================================================


class TestStatus(Enum):
    """测试状态枚举"""

    PASSED = "PASSED"
    FAILED = "FAILED"
    SKIPPED = "SKIPPED"
    ERROR = "ERROR"


@dataclass
class TestResult:
    """测试结果数据类"""

    __test__ = False

    name: str
    status: TestStatus
    duration: float
    message: str = ""
    error: Optional[Exception] = None
    details: Optional[Dict[str, Any]] = None


class TestSuite:
    """测试套件"""

    __test__ = False

    def __init__(self, name: str):
        """初始化测试套件

        Args:
            name: 测试套件名称
        """
        self.name = name
        self.tests: List[Tuple[str, Callable]] = []
        self.results: List[TestResult] = []
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def add_test(self, name: str, test_func: Callable):
        """添加测试用例

        Args:
            name: 测试名称
            test_func: 测试函数
        """
        self.tests.append((name, test_func))

    def run(self, verbose: bool = False) -> bool:
        """运行测试套件

        Args:
            verbose: 是否显示详细信息

        Returns:
            bool: 是否所有测试都通过
        """
        self.start_time = time.time()

        print(f"\n🧪 运行测试套件: {self.name}")
        print("=" * 60)

        all_passed = True
        for test_name, test_func in self.tests:
            result = self._run_single_test(test_name, test_func, verbose)
            self.results.append(result)
            if result.status != TestStatus.PASSED:
                all_passed = False

        self.end_time = time.time()
        self._print_summary()
        return all_passed

    def _run_single_test(self, name: str, test_func: Callable, verbose: bool) -> TestResult:
        start_time = time.time()

        print(f"\n📋 {name}")
        print("-" * 40)

        try:
            test_func()
            duration = time.time() - start_time
            print(f"✅ {name} - 通过 ({duration:.3f}s)")
            return TestResult(name=name, status=TestStatus.PASSED, duration=duration,
                              message="测试通过")

        except AssertionError as e:
            duration = time.time() - start_time
            print(f"❌ {name} - 失败 ({duration:.3f}s)")
            print(f"   断言: {e}")
            if verbose:
                traceback.print_exc()
            return TestResult(name=name, status=TestStatus.FAILED, duration=duration,
                              message=str(e), error=e)

        except Exception as e:
            duration = time.time() - start_time
            print(f"❌ {name} - 出错 ({duration:.3f}s)")
            if verbose:
                print(f"   错误详情: {e}")
                traceback.print_exc()
            else:
                print(f"   错误: {e}")
            return TestResult(name=name, status=TestStatus.ERROR, duration=duration,
                              message=str(e), error=e)

    def _print_summary(self):
        """打印测试摘要"""
        if not self.results:
            return

        total = len(self.results)
        passed = sum(1 for r in self.results if r.status == TestStatus.PASSED)
        duration = (self.end_time or 0) - (self.start_time or 0)

        print(f"\n📊 测试摘要: {self.name}")
        print("-" * 40)
        print(f"总测试数: {total}")
        print(f"通过: {passed}")
        print(f"失败: {total - passed}")
        print(f"总耗时: {duration:.3f}s")

        if passed < total:
            print("\n❌ 失败的测试:")
            for result in self.results:
                if result.status != TestStatus.PASSED:
                    print(f"  - {result.name}: {result.message}")
        print()


class TestEnvironment:
    """测试环境管理器

    提供临时目录、测度描述文件，以及环境变量的临时修改。
    """

    __test__ = False

    def __init__(self):
        self.temp_dirs: List[Path] = []
        self.saved_env: Dict[str, Optional[str]] = {}

    def temp_dir(self) -> Path:
        """创建临时目录"""
        path = Path(tempfile.mkdtemp(prefix="freesupp_test_"))
        self.temp_dirs.append(path)
        return path

    def write_measure(self, name: str, data: Dict[str, Any], directory: Optional[Path] = None) -> Path:
        """写出测度描述文件

        Args:
            name: 文件名（不含目录）
            data: 测度描述字典
            directory: 目标目录，None 时新建临时目录

        Returns:
            Path: 文件路径
        """
        directory = directory or self.temp_dir()
        path = directory / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    def set_env(self, key: str, value: str):
        if key not in self.saved_env:
            self.saved_env[key] = os.environ.get(key)
        os.environ[key] = value

    def cleanup(self):
        """清理所有临时资源"""
        for key, value in self.saved_env.items():
            if value is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = value
        self.saved_env.clear()

        for temp_dir in self.temp_dirs:
            if temp_dir.exists():
                shutil.rmtree(temp_dir)
        self.temp_dirs.clear()


def run_cli(argv):
    """运行 CLI 并捕获输出

    Returns:
        tuple: (退出码, 标准输出, 标准错误)
    """
    from freesupp.cli.main import main as cli_main

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(list(argv))
    return code, out.getvalue(), err.getvalue()


def run_single_test(test_map: Dict[str, Tuple[str, Callable]], test_name: str,
                    verbose: bool = False) -> bool:
    """运行指定的单个测试

    Args:
        test_map: 测试名 -> (显示名, 测试函数)
        test_name: 测试名称
        verbose: 是否显示详细信息

    Returns:
        bool: 测试是否通过
    """
    if test_name not in test_map:
        print(f"❌ 未知的测试名称: {test_name}")
        print("\n可用的测试:")
        for key, (display_name, _) in test_map.items():
            print(f"  {key}: {display_name}")
        return False

    display_name, test_func = test_map[test_name]
    print(f"🧪 运行单个测试: {display_name}")
    print("=" * 60)

    try:
        start_time = time.time()
        test_func()
        duration = time.time() - start_time
        print(f"\n✅ 测试 '{display_name}' 通过！({duration:.3f}s)")
        return True

    except Exception as e:
        print(f"\n❌ 测试 '{display_name}' 失败！")
        if verbose:
            print(f"错误详情: {e}")
            traceback.print_exc()
        else:
            print(f"错误: {e}")
        return False


def run_all_tests(title: str, suites: List[TestSuite], verbose: bool = False) -> bool:
    """运行所有测试套件并打印总体摘要"""
    print(f"🧪 {title}")
    print("=" * 60)

    all_passed = True
    total_tests = 0
    total_passed = 0

    for suite in suites:
        if not suite.run(verbose):
            all_passed = False
        total_passed += len([r for r in suite.results if r.status == TestStatus.PASSED])
        total_tests += len(suite.tests)

    print("\n🎯 总体测试摘要")
    print("=" * 60)
    print(f"测试套件数: {len(suites)}")
    print(f"总测试数: {total_tests}")
    print(f"通过: {total_passed}")
    print(f"失败: {total_tests - total_passed}")

    if all_passed:
        print("\n🎉 所有测试通过！")
    else:
        print("\n❌ 部分测试失败，请检查相关功能。")
    return all_passed


def test_main(title: str, create_suites: Callable[[], List[TestSuite]],
              test_map: Dict[str, Tuple[str, Callable]]):
    """各测试脚本共用的命令行入口"""
    parser = argparse.ArgumentParser(description=title)
    parser.add_argument("--test", "-t", choices=list(test_map), help="指定要运行的单个测试")
    parser.add_argument("--verbose", "-v", action="store_true", help="显示详细信息")
    args = parser.parse_args()

    try:
        if args.test:
            success = run_single_test(test_map, args.test, args.verbose)
        else:
            success = run_all_tests(title, create_suites(), args.verbose)
        sys.exit(0 if success else 1)

    except KeyboardInterrupt:
        print("\n⚠️ 测试被用户中断")
        sys.exit(130)
    except Exception as e:
        print(f"\n💥 测试运行器异常: {e}")
        if args.verbose:
            traceback.print_exc()
        sys.exit(1)


# pytest 不要把入口函数当成测试
test_main.__test__ = False


# ============================================================================
# 配置、异常、日志与文件工具
# ============================================================================


def test_config_defaults():
    """测试默认配置与覆盖项"""
    from freesupp.config import Config

    config = Config()
    assert config.get("subordination", "tol") == 1e-12, "默认 tol 应为 1e-12"
    assert config.get("quadrature", "nodes") == 200, "默认求积节点数应为 200"
    assert config.get("oracle", "seed") == 0, "默认随机种子应为 0"
    assert config.get("missing", "key", "fallback") == "fallback", "缺失键应返回默认值"

    config.apply_overrides({("subordination", "tol"): 1e-9, ("oracle", "trials"): None})
    assert config.get("subordination", "tol") == 1e-9, "覆盖项未生效"
    assert config.get("oracle", "trials") == 20, "值为 None 的覆盖项应被忽略"

    other = Config()
    assert other.get("subordination", "tol") == 1e-12, "覆盖项不应修改默认配置"

    print("✅ 默认配置测试通过")


def test_config_sources():
    """测试配置文件与环境变量"""
    from freesupp.config import Config, get_config, reset_config

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        config_file = directory / "freesupp_config.json"
        config_file.write_text(json.dumps({"support": {"grid_size": 128}}), encoding="utf-8")

        config = Config(config_file)
        assert config.get("support", "grid_size") == 128, "配置文件未生效"
        assert config.get("support", "tol_t") == 1e-9, "深度合并不应丢失其余键"

        env.set_env("FREESUPP_SEED", "42")
        env.set_env("FREESUPP_TOL", "not-a-number")
        config = Config(config_file)
        assert config.get("oracle", "seed") == 42, "环境变量未生效"
        assert config.get("subordination", "tol") == 1e-12, "格式错误的环境变量应被忽略"

        saved = directory / "saved.json"
        config.save_to_file(saved)
        assert json.loads(saved.read_text(encoding="utf-8"))["oracle"]["seed"] == 42

        reset_config()
        assert get_config() is get_config(), "全局配置应为单例"
        reset_config()

        print("✅ 配置来源测试通过")
    finally:
        env.cleanup()


def test_error_hierarchy():
    """测试异常层次"""
    from freesupp.core import errors

    assert issubclass(errors.MassNotOneError, errors.MeasureError)
    assert issubclass(errors.EvalOnSupportError, errors.TransformError)
    assert issubclass(errors.NotConvergedError, errors.SubordinationError)
    assert issubclass(errors.CriterionFailedError, errors.SupportError)
    assert issubclass(errors.NonHermitianFalloutError, errors.OracleError)
    for name in ("MeasureError", "TransformError", "SubordinationError", "SupportError",
                 "OracleError"):
        assert issubclass(getattr(errors, name), errors.FreeSuppError), f"{name} 应继承 FreeSuppError"

    e = errors.NotConvergedError("未收敛", best=1 + 2j, residual=1e-3)
    assert e.best == 1 + 2j and e.residual == 1e-3, "NotConvergedError 应保留最后的迭代值"

    print("✅ 异常层次测试通过")


def test_logger_setup():
    """测试日志系统"""
    from freesupp.utils.logger import setup_logger

    env = TestEnvironment()
    try:
        log_file = env.temp_dir() / "logs" / "run.log"
        logger = setup_logger("freesupp.test_logger", "debug", log_file=log_file)
        assert logger.level == logging.DEBUG, "字符串级别应被解析"
        count = len(logger.handlers)
        assert count == 2, f"应有控制台与文件两个处理器: {count}"

        again = setup_logger("freesupp.test_logger", logging.WARNING)
        assert again is logger and len(again.handlers) == count, "重复调用不应添加处理器"
        assert again.level == logging.WARNING, "重复调用应调整级别"

        logger.warning("写入日志文件")
        for handler in list(logger.handlers):
            handler.flush()
            handler.close()
            logger.removeHandler(handler)
        assert "写入日志文件" in log_file.read_text(encoding="utf-8"), "日志文件内容缺失"

        print("✅ 日志系统测试通过")
    finally:
        env.cleanup()


def test_logging_from_config():
    """测试按配置设置日志与用时记录"""
    from freesupp.config import Config
    from freesupp.utils.logger import configure_logging, log_elapsed

    root = logging.getLogger("freesupp")
    saved = (root.level, list(root.handlers))
    for handler in saved[1]:
        root.removeHandler(handler)

    env = TestEnvironment()
    try:
        config = Config()
        logger = configure_logging(config)
        assert logger is root and logger.level == logging.WARNING, "默认级别为 WARNING"
        streams = [h.stream for h in logger.handlers if isinstance(h, logging.StreamHandler)]
        assert sys.stderr in streams, "日志应写到标准错误"

        assert configure_logging(config, verbose=True).level == logging.DEBUG

        env.set_env("FREESUPP_LOG_LEVEL", "error")
        assert configure_logging(Config()).level == logging.ERROR, "环境变量应决定级别"

        with log_elapsed(logger, "测试") as record:
            pass
        assert record["seconds"] >= 0.0

        print("✅ 配置日志测试通过")
    finally:
        env.cleanup()
        for handler in list(root.handlers):
            root.removeHandler(handler)
        root.setLevel(saved[0])
        for handler in saved[1]:
            root.addHandler(handler)


def test_fs_utils():
    """测试原子写入与 CSV 读写"""
    from freesupp.utils.fs import FileSystemUtils

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        target = directory / "nested" / "out.csv"
        FileSystemUtils.write_csv(target, ["x", "y"], [[1, 2.5], [3, "a"]])
        header, rows = FileSystemUtils.read_csv(target)
        assert header == ["x", "y"], f"表头错误: {header}"
        assert rows == [["1", "2.5"], ["3", "a"]], f"行错误: {rows}"
        assert target.read_bytes().count(b"\r") == 0, "行尾应为 \\n"

        FileSystemUtils.write_json(directory / "a.json", {"b": 1})
        assert json.loads((directory / "a.json").read_text(encoding="utf-8")) == {"b": 1}

        leftovers = [p.name for p in (directory / "nested").iterdir() if p.name.endswith(".tmp")]
        assert not leftovers, f"不应残留临时文件: {leftovers}"

        assert FileSystemUtils.safe_remove(target) is True
        assert FileSystemUtils.safe_remove(target) is False

        print("✅ 文件工具测试通过")
    finally:
        env.cleanup()


def create_test_suites() -> List[TestSuite]:
    """创建测试套件"""
    suite = TestSuite("配置与基础设施")
    suite.add_test("默认配置", test_config_defaults)
    suite.add_test("配置来源", test_config_sources)
    suite.add_test("异常层次", test_error_hierarchy)
    suite.add_test("日志系统", test_logger_setup)
    suite.add_test("配置日志", test_logging_from_config)
    suite.add_test("文件工具", test_fs_utils)
    return [suite]


TEST_MAP = {
    "config": ("默认配置", test_config_defaults),
    "sources": ("配置来源", test_config_sources),
    "errors": ("异常层次", test_error_hierarchy),
    "logger": ("日志系统", test_logger_setup),
    "logging": ("配置日志", test_logging_from_config),
    "fs": ("文件工具", test_fs_utils),
}


if __name__ == "__main__":
    test_main("freesupp 基础设施测试", create_test_suites, TEST_MAP)
