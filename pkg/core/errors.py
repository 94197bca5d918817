"""
求解器异常定义
"""

from __future__ import annotations

from typing import Optional


class NormalModeError(Exception):
    """所有求解器异常的基类（CLI 统一映射为退出码 1）"""


class InvalidArgumentError(NormalModeError, ValueError):
    """参数非法"""


class OutOfDomainError(NormalModeError, ValueError):
    """自变量超出定义域"""


class EnvFileError(NormalModeError, ValueError):
    """环境文件解析错误，带行号定位"""

    def __init__(self, message: str, line_no: Optional[int] = None) -> None:
        self.message = message
        self.line_no = line_no
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line_no is None:
            return self.message
        return f"line {self.line_no}: {self.message}"


class SpecInvariantError(ValueError):
    """pydantic 校验器内部使用：记录违反约束的键，便于解析器定位到行"""

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        super().__init__(message)
        self.key = key


class DegenerateConstraintsError(NormalModeError):
    """约束块 L22 奇异或病态"""


class DegenerateModeError(NormalModeError):
    """模态归一化积分为零"""


class NoPropagatingModesError(NormalModeError):
    """相速度窗口内没有传播模态"""


class NumericalFailureError(NormalModeError, ArithmeticError):
    """特征值迭代不收敛等数值失败"""
