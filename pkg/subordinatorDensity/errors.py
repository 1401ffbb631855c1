#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
异常定义模块
所有模块抛出的异常都继承自 SubordinatorDensityError，CLI 根据异常类别映射退出码
"""

from typing import Any, Optional


class SubordinatorDensityError(Exception):
    """项目异常基类"""

    exit_code = 1


class ConfigError(SubordinatorDensityError):
    """配置解析或校验失败（退出码 2）"""

    exit_code = 2


class CapabilityError(SubordinatorDensityError):
    """模型不支持所请求的方法，例如缺少解析延拓（退出码 3）"""

    exit_code = 3


class DomainError(SubordinatorDensityError, ValueError):
    """参数超出数学定义域"""

    exit_code = 2


class NumericalError(SubordinatorDensityError):
    """
    数值计算失败（退出码 4）

    Args:
        message: 错误描述
        best_estimate: 失败前得到的最好估计值
        error_estimate: 对应的误差估计
    """

    exit_code = 4

    def __init__(self, message: str, best_estimate: Any = None, error_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class QuadratureNonConvergence(NumericalError):
    """自适应积分在细分上限内未达到容差"""


class SlowDecayError(NumericalError):
    """Bromwich 竖线积分尾部衰减过慢，截断无法满足容差"""


class ContourError(NumericalError):
    """倾斜围道的几何参数无效或节点预算耗尽"""


class DerivativeInstabilityError(NumericalError):
    """有限差分在两个步长下的估计互相矛盾"""


class SeriesNotConverged(NumericalError):
    """时间级数在项数预算内未收敛"""


class InfeasibleSchemeError(NumericalError):
    """复合泊松近似方案对该模型不可行（总质量无穷或不可积）"""


class BellOverflowError(NumericalError):
    """Faà di Bruno 展开中的 Bell 多项式溢出"""
