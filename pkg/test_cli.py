#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI 测试

通过 run_cli 在进程内调用 main(argv)，检查输出与退出码。
"""

import json
import math

import pytest

from test_framework import (
    BERNOULLI,
    PROJECTION,
    SEMICIRCLE,
    SYMMETRY,
    TestEnvironment,
    TestSuite,
    run_cli,
    test_main,
)


def _csv_rows(text):
    lines = [line for line in text.splitlines() if line.strip()]
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_parser_and_overrides():
    """测试参数解析与配置覆盖"""
    from freesupp.cli.main import build_config, create_parser

    parser = create_parser()
    args = parser.parse_args([
        "support", "add", "a.json", "b.json", "--tol", "1e-10", "--N", "50", "--workers", "3",
    ])
    assert args.command == "support" and args.kind == "add"
    assert args.measures == ["a.json", "b.json"]

    config = build_config(args)
    assert config.get("subordination", "tol") == 1e-10
    assert config.get("oracle", "matrix_size") == 50
    assert config.get("support", "workers") == 3
    assert config.get("oracle", "trials") == 20, "未给出的参数保持默认值"

    with pytest.raises(SystemExit):
        parser.parse_args(["support", "sum", "a.json", "b.json"])

    print("✅ 参数解析测试通过")


def test_support_command():
    """测试 support 命令的三种输出格式"""
    from freesupp.utils.output import read_support

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        bern = str(env.write_measure("bern.json", BERNOULLI, directory))

        code, out, err = run_cli(["support", "add", bern, bern])
        assert code == 0, f"退出码 {code}: {err}"
        assert "[-2.000000, 2.000000]" in out, out
        assert "components: 1" in out
        assert "bound: 1 <= 7 (ok)" in out

        target = directory / "support.json"
        code, _, _ = run_cli(["support", "add", bern, bern, "-f", "json", "-o", str(target)])
        assert code == 0
        data = json.loads(target.read_text(encoding="utf-8"))
        assert data["kind"] == "add" and data["components"] == 1
        support = read_support(target)
        lo, hi = support.hull()
        assert abs(lo + 2.0) < 1e-6 and abs(hi - 2.0) < 1e-6

        code, out, _ = run_cli(["support", "add", bern, bern, "-f", "csv"])
        assert code == 0
        header, rows = _csv_rows(out)
        assert header == ["lo", "hi"] and len(rows) == 1

        code, out, _ = run_cli(["support", "add", bern, bern, "--round-trip"])
        assert code == 0, "往返检查应全部通过"

        proj = str(env.write_measure("proj.json", PROJECTION, directory))
        code, out, _ = run_cli(["support", "mult-r", proj, proj])
        assert code == 0 and "[0.000000, 1.000000]" in out, out

        sym = str(env.write_measure("sym.json", SYMMETRY, directory))
        code, out, _ = run_cli(["support", "mult-t", sym, sym])
        assert code == 0 and "e_components: 4 (n1*n2 = 4)" in out, out

        print("✅ support 命令测试通过")
    finally:
        env.cleanup()


def test_density_command():
    """测试 density 命令"""
    from freesupp.solvers.density import read_density_csv

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        bern = str(env.write_measure("bern.json", BERNOULLI, directory))

        code, out, err = run_cli(["density", "add", bern, bern, "--points", "0", "1"])
        assert code == 0, f"退出码 {code}: {err}"
        header, rows = _csv_rows(out)
        assert header == ["x", "density", "eps_used", "flag"]
        assert float(rows[0]["x"]) == 0.0
        assert abs(float(rows[0]["density"]) - 1.0 / (2.0 * math.pi)) < 1e-6
        assert rows[0]["flag"] == "ok"

        target = directory / "density.csv"
        code, _, _ = run_cli(["density", "add", bern, bern, "--grid", "-1", "1", "5", "-o", str(target)])
        assert code == 0
        grid = read_density_csv(target)
        assert grid.points.size == 5

        code, out, _ = run_cli(["density", "add", bern, bern, "--points", "0.5", "-f", "json"])
        assert code == 0
        data = json.loads(out)
        assert data["domain"] == "real" and len(data["values"]) == 1

        code, _, err = run_cli(["density", "add", bern, bern])
        assert code == 1 and "--grid" in err, "缺少网格应报错"

        print("✅ density 命令测试通过")
    finally:
        env.cleanup()


def test_omega_command():
    """测试 omega 命令"""
    from freesupp.utils.output import read_omega

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        semi = str(env.write_measure("semi.json", SEMICIRCLE, directory))

        code, out, err = run_cli(["omega", "add", semi, semi, "--points", "0+1j"])
        assert code == 0, f"退出码 {code}: {err}"
        _, rows = _csv_rows(out)
        assert abs(float(rows[0]["omega1_im"]) - 1.5) < 1e-9
        assert abs(float(rows[0]["omega1_re"])) < 1e-9
        assert rows[0]["converged"] == "1"

        target = directory / "omega.json"
        code, _, _ = run_cli(["omega", "add", semi, semi, "--points", "0", "0.5+0.5j",
                              "-f", "json", "-o", str(target)])
        assert code == 0
        values = read_omega(target)
        assert len(values) == 2
        assert abs(values[0].omega1 - 1j / math.sqrt(2.0)) < 1e-6, "实轴点取边界值"

        # 𝕋 上的实数输入是角度
        sym = str(env.write_measure("sym.json", SYMMETRY, directory))
        code, out, _ = run_cli(["omega", "mult-t", sym, sym, "--points", "0.3"])
        _, rows = _csv_rows(out)
        assert abs(float(rows[0]["x_re"]) - math.cos(0.3)) < 1e-12
        assert abs(float(rows[0]["x_im"]) - math.sin(0.3)) < 1e-12

        code, _, err = run_cli(["omega", "add", semi, semi, "--points", "abc"])
        assert code == 1 and "abc" in err

        print("✅ omega 命令测试通过")
    finally:
        env.cleanup()


def test_approx_command():
    """测试 approx 命令输出可重新加载的测度"""
    from freesupp.loaders.measure_loader import load_measure

    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        bern = str(env.write_measure("bern.json", BERNOULLI, directory))
        target = directory / "smooth.json"

        code, _, err = run_cli(["approx", bern, "--eps", "0.01", "-o", str(target)])
        assert code == 0, f"退出码 {code}: {err}"
        smooth = load_measure(target)
        assert not smooth.atoms, "逼近测度没有原子"
        assert len(smooth.ac_components) == 2
        assert abs(sum(c.weight for c in smooth.ac_components) - 1.0) < 1e-9

        code, _, _ = run_cli(["approx", bern, "--eps", "-1"])
        assert code == 1

        print("✅ approx 命令测试通过")
    finally:
        env.cleanup()


def test_exit_codes():
    """测试错误输入的退出码"""
    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        bern = str(env.write_measure("bern.json", BERNOULLI, directory))
        proj = str(env.write_measure("proj.json", PROJECTION, directory))
        broken = directory / "broken.json"
        broken.write_text("{not json", encoding="utf-8")

        code, out, _ = run_cli([])
        assert code == 1 and "COMMAND" in out, "无命令时打印帮助"

        code, _, err = run_cli(["support", "add", bern, str(directory / "missing.json")])
        assert code == 1 and "❌" in err

        code, _, err = run_cli(["support", "add", bern, str(broken)])
        assert code == 1

        code, _, err = run_cli(["support", "add", bern, proj])
        assert code == 1 and "halfline" in err, "域不匹配应报错"

        print("✅ 退出码测试通过")
    finally:
        env.cleanup()


@pytest.mark.slow
def test_oracle_command():
    """测试 oracle 命令与支撑文件对照"""
    env = TestEnvironment()
    try:
        directory = env.temp_dir()
        bern = str(env.write_measure("bern.json", BERNOULLI, directory))
        support = directory / "support.json"
        eigen = directory / "eigen.csv"

        code, _, _ = run_cli(["support", "add", bern, bern, "-f", "json", "-o", str(support)])
        assert code == 0

        code, out, err = run_cli([
            "oracle", "add", bern, bern, "--N", "100", "--trials", "2", "--seed", "5",
            "--support", str(support), "--eigenvalues", str(eigen),
        ])
        assert code == 0, f"退出码 {code}: {err}"
        assert "samples: 200" in out
        assert "agrees: True" in out, out
        assert eigen.read_text(encoding="utf-8").startswith("trial,index,value")

        print("✅ oracle 命令测试通过")
    finally:
        env.cleanup()


def create_test_suites():
    basics = TestSuite("解析与错误")
    basics.add_test("参数解析", test_parser_and_overrides)
    basics.add_test("退出码", test_exit_codes)

    commands = TestSuite("子命令")
    commands.add_test("support", test_support_command)
    commands.add_test("density", test_density_command)
    commands.add_test("omega", test_omega_command)
    commands.add_test("approx", test_approx_command)
    commands.add_test("oracle", test_oracle_command)
    return [basics, commands]


TEST_MAP = {
    "parser": ("参数解析", test_parser_and_overrides),
    "exit": ("退出码", test_exit_codes),
    "support": ("support", test_support_command),
    "density": ("density", test_density_command),
    "omega": ("omega", test_omega_command),
    "approx": ("approx", test_approx_command),
    "oracle": ("oracle", test_oracle_command),
}


if __name__ == "__main__":
    test_main("freesupp CLI 测试", create_test_suites, TEST_MAP)
