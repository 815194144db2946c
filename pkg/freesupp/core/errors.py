#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义

定义框架中使用的所有异常类型。
每一类数值失败都有独立的异常，CLI 根据异常类型决定退出码。
"""


class FreeSuppError(Exception):
    """框架所有异常的基类"""


# ----------------------------------------------------------------------------
# 测度
# ----------------------------------------------------------------------------


class MeasureError(FreeSuppError):
    """测度相关异常的基类"""


class NegativeMassError(MeasureError):
    """原子质量或密度权重为负"""


class MassNotOneError(MeasureError):
    """总质量偏离 1 超过容差"""


class DomainViolationError(MeasureError):
    """位置、区间或族参数不属于测度所在的域"""


class UnboundedSupportError(MeasureError):
    """操作要求紧支撑"""


class InfinitelyManyComponentsError(MeasureError):
    """支撑有无穷多个连通分支"""


class MeasureSpecError(MeasureError):
    """测度描述文件无法解析"""


# ----------------------------------------------------------------------------
# 变换
# ----------------------------------------------------------------------------


class TransformError(FreeSuppError):
    """解析变换求值异常的基类"""


class EvalOnSupportError(TransformError):
    """在支撑上对变换求值"""


class PoleOfFError(TransformError):
    """F = 1/G 在 G 的零点处有极点"""


class PsiIsMinusOneError(TransformError):
    """ψ = -1，η 在此处有极点"""


class EtaZeroError(TransformError):
    """η = 0，对数无定义"""


class BranchUndeterminedError(TransformError):
    """无法在容差内确定对数分支"""


# ----------------------------------------------------------------------------
# 从属函数
# ----------------------------------------------------------------------------


class SubordinationError(FreeSuppError):
    """从属函数计算异常的基类"""


class PointMassInputError(SubordinationError):
    """输入是点质量，应由调用方做平移/伸缩"""


class DegenerateInputError(SubordinationError):
    """乘法卷积的输入是退化测度"""


class NotConvergedError(SubordinationError):
    """不动点迭代未收敛

    Attributes:
        best: 最后一次迭代值
        residual: 对应的残差
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class NoLimitError(SubordinationError):
    """沿 ε 序列振荡，边界值不存在"""


# ----------------------------------------------------------------------------
# 支撑与随机矩阵
# ----------------------------------------------------------------------------


class SupportError(FreeSuppError):
    """支撑计算异常的基类"""


class CriterionFailedError(SupportError):
    """配对不满足判据，无法映射为间隙点"""


class OracleError(FreeSuppError):
    """随机矩阵对照异常的基类"""


class NonHermitianFalloutError(OracleError):
    """特征值求解残差过大"""
