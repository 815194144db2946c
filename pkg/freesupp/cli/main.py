#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI 主入口

退出码：0 成功，1 解析/校验失败，2 数值未收敛（结果已写出并带标记），
130 被用户中断。
"""

import argparse
import sys

from .. import __version__
from ..config import Config
from ..core.errors import FreeSuppError, MeasureError
from ..utils.logger import configure_logging
from .commands import EXIT_FAILED, FreeSuppCLI

KINDS = ["add", "mult-r", "mult-t"]

# 命令行参数 -> (配置段, 键)
OVERRIDES = {
    "tol": ("subordination", "tol"),
    "eps0": ("subordination", "eps0"),
    "eps_ratio": ("subordination", "eps_ratio"),
    "max_iter": ("subordination", "max_iter"),
    "quad_nodes": ("quadrature", "nodes"),
    "seed": ("oracle", "seed"),
    "matrix_size": ("oracle", "matrix_size"),
    "trials": ("oracle", "trials"),
    "gap_threshold": ("oracle", "gap_threshold"),
    "workers": ("support", "workers"),
}


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="显示详细日志")
    common.add_argument("--config", help="JSON 配置文件")
    common.add_argument("--output", "-o", help="输出文件 (默认: 标准输出)")
    common.add_argument("--format", "-f", choices=["text", "json", "csv"], help="输出格式")
    common.add_argument("--tol", type=float, help="不动点迭代容差")
    common.add_argument("--eps0", type=float, help="ε 序列的首项")
    common.add_argument("--eps-ratio", type=float, help="ε 序列的公比")
    common.add_argument("--max-iter", type=int, help="最大迭代次数")
    common.add_argument("--quad-nodes", type=int, help="每个连续分量的求积节点数")
    common.add_argument("--seed", type=int, help="随机种子")
    common.add_argument("--N", dest="matrix_size", type=int, help="随机矩阵阶数")
    common.add_argument("--trials", type=int, help="随机矩阵试验次数")
    common.add_argument("--gap-threshold", type=float, help="特征值间隙阈值")
    common.add_argument("--workers", type=int, help="曲线追踪线程数")
    return common


def create_parser():
    """创建命令行解析器

    Returns:
        argparse.ArgumentParser: 命令行解析器
    """
    parser = argparse.ArgumentParser(
        prog="freesupp",
        description="自由卷积的支撑、密度与随机矩阵对照",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  freesupp support add bern.json bern.json                 # ⊞ 的支撑
  freesupp support mult-r proj.json proj.json -f json      # ℝ₊ 上 ⊠ 的支撑 (JSON)
  freesupp density add bern.json bern.json --grid -3 3 61  # 网格上的密度 (CSV)
  freesupp omega add semi.json semi.json --points 0.5 0+1j # 从属函数
  freesupp oracle add bern.json bern.json --support out.json --N 2000
  freesupp approx atoms.json --eps 0.01 -o smooth.json     # Jacobi 型逼近
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = _common_parser()
    subparsers = parser.add_subparsers(dest="command", help="可用命令", metavar="COMMAND")

    support_parser = subparsers.add_parser(
        "support", parents=[common], help="卷积支撑", description="用配对曲线判据计算卷积支撑"
    )
    support_parser.add_argument("kind", choices=KINDS)
    support_parser.add_argument("measures", nargs=2, metavar="MEASURE")
    support_parser.add_argument("--round-trip", action="store_true", help="对每个间隙做往返检查")

    density_parser = subparsers.add_parser(
        "density", parents=[common], help="卷积密度", description="通过从属函数反演求密度"
    )
    density_parser.add_argument("kind", choices=KINDS)
    density_parser.add_argument("measures", nargs=2, metavar="MEASURE")
    density_parser.add_argument("--grid", nargs=3, metavar=("LO", "HI", "COUNT"), help="均匀网格")
    density_parser.add_argument("--points", nargs="+", help="显式网格点")

    omega_parser = subparsers.add_parser(
        "omega", parents=[common], help="从属函数", description="求从属函数 ω₁、ω₂"
    )
    omega_parser.add_argument("kind", choices=KINDS)
    omega_parser.add_argument("measures", nargs=2, metavar="MEASURE")
    omega_parser.add_argument("--points", nargs="+", required=True, help="求值点 (实数或复数)")

    oracle_parser = subparsers.add_parser(
        "oracle", parents=[common], help="随机矩阵对照", description="Haar 共轭随机矩阵的经验谱"
    )
    oracle_parser.add_argument("kind", choices=KINDS)
    oracle_parser.add_argument("measures", nargs=2, metavar="MEASURE")
    oracle_parser.add_argument("--support", help="support 命令写出的支撑文件")
    oracle_parser.add_argument("--eigenvalues", help="导出特征值 CSV")

    approx_parser = subparsers.add_parser(
        "approx", parents=[common], help="Jacobi 型逼近", description="构造边缘平方根型的逼近测度"
    )
    approx_parser.add_argument("measure")
    approx_parser.add_argument("--eps", type=float, required=True, help="精度")
    approx_parser.add_argument("--edge-exponent", type=float, default=0.5, help="外侧边缘密度指数")

    return parser


def build_config(args):
    """默认值 → 配置文件 → 环境变量 → 命令行参数"""
    config = Config(args.config)
    config.apply_overrides({
        section_key: getattr(args, name, None) for name, section_key in OVERRIDES.items()
    })
    return config


def main(argv=None):
    """CLI 主函数"""
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_FAILED

    try:
        config = build_config(args)
        configure_logging(config, args.verbose)
        cli = FreeSuppCLI(config)

        if args.command == "support":
            return cli.support(args.kind, args.measures, args.output, args.format or "text",
                               round_trip=args.round_trip)

        elif args.command == "density":
            return cli.density(args.kind, args.measures, args.grid, args.points, args.output,
                               args.format or "csv")

        elif args.command == "omega":
            return cli.omega(args.kind, args.measures, args.points, args.output,
                             args.format or "csv")

        elif args.command == "oracle":
            return cli.oracle(args.kind, args.measures, args.support, args.eigenvalues,
                              args.output, args.format or "text")

        elif args.command == "approx":
            return cli.approx(args.measure, args.eps, args.edge_exponent, args.output)

        else:
            print(f"❌ 未知命令: {args.command}", file=sys.stderr)
            parser.print_help()
            return EXIT_FAILED

    except KeyboardInterrupt:
        print("\n⚠️ 操作被用户中断", file=sys.stderr)
        return 130

    except (MeasureError, ValueError) as e:
        print(f"❌ 输入无效: {e}", file=sys.stderr)
        return EXIT_FAILED

    except FreeSuppError as e:
        print(f"❌ 计算失败: {e}", file=sys.stderr)
        return EXIT_FAILED

    except Exception as e:
        print(f"❌ 命令执行失败: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
