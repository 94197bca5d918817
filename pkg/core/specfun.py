"""
声场合成所需的特殊函数：零阶第一类 Hankel 函数
"""

from __future__ import annotations

from typing import Union

import numpy as np
from scipy import special

from core.errors import OutOfDomainError

ArrayLike = Union[float, np.ndarray]


def hankel1_0(x: ArrayLike) -> Union[complex, np.ndarray]:
    """
    H0^(1)(x) = J0(x) + i·Y0(x)，实宗量 x > 0

    Raises:
        OutOfDomainError: x <= 0（Y0 在 0 处奇异）
    """
    xx = np.asarray(x, dtype=float)
    if np.any(~(xx > 0.0)):
        raise OutOfDomainError("hankel1_0 requires x > 0")
    out = special.j0(xx) + 1j * special.y0(xx)
    if out.ndim == 0:
        return complex(out)
    return out


def hankel1_0_complex(z: ArrayLike) -> Union[complex, np.ndarray]:
    """
    复宗量 H0^(1)(z)，Re z > 0
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(~(zz.real > 0.0)):
        raise OutOfDomainError("hankel1_0_complex requires Re z > 0")
    out = special.hankel1(0, zz)
    if out.ndim == 0:
        return complex(out)
    return out
