"""
环境剖面求值与复波数
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np

from core.errors import InvalidArgumentError, OutOfDomainError
from models.environment import Profile, ProfileKind

ArrayLike = Union[float, np.ndarray]

# 衰减换算常数 η = (40π·log10 e)^-1，α 单位 dB/λ
ETA = 1.0 / (40.0 * math.pi * math.log10(math.e))


def _constant(z: np.ndarray, value: float) -> np.ndarray:
    return np.full_like(z, value)


def _pseudolinear(z: np.ndarray, a: float, b: float) -> np.ndarray:
    arg = a * z + b
    if np.any(arg <= 0.0):
        raise OutOfDomainError("pseudolinear profile undefined where a*z + b <= 0")
    return 1.0 / np.sqrt(arg)


def _munk(z: np.ndarray, c0: float, eps: float, z_axis: float, scale: float) -> np.ndarray:
    zt = (z - z_axis) / scale
    return c0 * (1.0 + eps * (zt - 1.0 + np.exp(-zt)))


def _linear_bottom(z: np.ndarray, slope: float, c0: float) -> np.ndarray:
    return slope * z + c0


def _exp_bottom_a(z: np.ndarray, c0: float, amp: float, z_ref: float, scale: float) -> np.ndarray:
    return c0 + amp * np.exp((z - z_ref) / scale)


def _exp_bottom_b(z: np.ndarray, c0: float, amp: float, z_ref: float, scale: float) -> np.ndarray:
    return c0 - amp * np.exp(-(z - z_ref) / scale)


def _exp_density(z: np.ndarray, scale: float) -> np.ndarray:
    return np.exp(z / scale)


def _linear_atten(z: np.ndarray, slope: float, offset: float) -> np.ndarray:
    # 不截断负值：只在声明的层内求值
    return slope * z + offset


BUILTIN_PROFILES: dict[str, Callable[..., np.ndarray]] = {
    "constant": _constant,
    "pseudolinear": _pseudolinear,
    "munk": _munk,
    "linear_bottom": _linear_bottom,
    "exp_bottom_a": _exp_bottom_a,
    "exp_bottom_b": _exp_bottom_b,
    "exp_density": _exp_density,
    "linear_atten": _linear_atten,
}


def eval_profile(profile: Profile, z: ArrayLike) -> ArrayLike:
    """
    在深度 z 处求剖面值

    Args:
        profile: 剖面
        z: 深度（m），标量或数组

    Returns:
        与 z 同形状的实数值
    """
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if not np.all(np.isfinite(zz)):
        raise OutOfDomainError("profile evaluated at a non-finite depth")

    if profile.kind == ProfileKind.TABULATED:
        depths = np.array([p[0] for p in profile.table])
        values = np.array([p[1] for p in profile.table])
        if np.any(zz < depths[0]) or np.any(zz > depths[-1]):
            raise OutOfDomainError(
                f"depth outside tabulated profile domain [{depths[0]}, {depths[-1]}]"
            )
        out = np.interp(zz, depths, values)
    else:
        out = BUILTIN_PROFILES[profile.name](zz, **profile.resolved_params())

    if scalar:
        return float(out[0])
    return out


def complex_wavenumber(c: ArrayLike, alpha: ArrayLike, omega: float) -> ArrayLike:
    """
    k = (1 + iηα)·ω/c

    Args:
        c: 声速 m/s（> 0）
        alpha: 衰减 dB/λ
        omega: 角频率 rad/s（> 0）
    """
    if not omega > 0.0:
        raise InvalidArgumentError(f"omega must be positive, got {omega}")
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr <= 0.0):
        raise InvalidArgumentError("sound speed must be positive")
    alpha_arr = np.asarray(alpha, dtype=float)

    k = (1.0 + 1j * ETA * alpha_arr) * omega / c_arr
    if np.ndim(k) == 0:
        return complex(k)
    return k
