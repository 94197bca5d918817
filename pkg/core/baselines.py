"""
参考解：等声速解析波数与二阶有限差分求解器（只用于收敛性对比）
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import scipy.linalg

from core.errors import InvalidArgumentError
from models.environment import AnalyticIsoSpec, BottomBC, EnvironmentSpec


def _vertical_wavenumbers(spec: AnalyticIsoSpec, m: np.ndarray) -> np.ndarray:
    if spec.bc == BottomBC.FREE:
        return m * math.pi / spec.depth_h
    return (2 * m - 1) * math.pi / (2.0 * spec.depth_h)


def analytic_iso_wavenumbers(spec: AnalyticIsoSpec, m_max: int) -> np.ndarray:
    """
    k_rm = sqrt(k0² − k_zm²)，m = 1..m_max，主值平方根（消逝模为纯虚数）
    """
    if m_max < 1:
        raise InvalidArgumentError(f"m_max must be >= 1, got {m_max}")
    kz = _vertical_wavenumbers(spec, np.arange(1, m_max + 1))
    return np.sqrt((spec.k0**2 - kz**2).astype(complex))


def analytic_iso_propagating(spec: AnalyticIsoSpec) -> np.ndarray:
    """全部传播模（k_zm < k0）"""
    kz_step = math.pi / spec.depth_h
    m_max = int(spec.k0 / kz_step) + 2
    kr = analytic_iso_wavenumbers(spec, m_max)
    return kr[kr.imag == 0.0].real


def fdm_iso_modes(spec: AnalyticIsoSpec, n_points: int) -> np.ndarray:
    """
    三点差分 d²/dz² + k0²，网格 z_j = jH/n

    free 底：ψ_0 = ψ_n = 0，未知量 j = 1..n-1
    rigid 底：虚点 ψ_{n+1} = ψ_{n-1}，未知量 j = 1..n，
    末行 (2ψ_{n-1} − 2ψ_n)/Δ² 经 √2 相似变换对称化

    Returns:
        k_r，按 k_r² 降序（传播模在前）
    """
    if n_points < 10:
        raise InvalidArgumentError(f"n_points must be >= 10, got {n_points}")
    step = spec.depth_h / n_points
    inv2 = 1.0 / step**2
    size = n_points - 1 if spec.bc == BottomBC.FREE else n_points

    diag = np.full(size, -2.0 * inv2 + spec.k0**2)
    off = np.full(size - 1, inv2)
    if spec.bc == BottomBC.RIGID:
        off[-1] = math.sqrt(2.0) * inv2

    kr2 = scipy.linalg.eigvalsh_tridiagonal(diag, off)[::-1]
    return np.sqrt(kr2.astype(complex))


def iso_reference(env: EnvironmentSpec) -> Optional[AnalyticIsoSpec]:
    """两层参数完全相同且为常数、无衰减时返回等效单层问题，否则 None"""
    values = []
    for layer in (env.water, env.bottom):
        triple = (layer.ssp.constant_value, layer.rho.constant_value, layer.alpha.constant_value)
        if any(v is None for v in triple):
            return None
        values.append(triple)
    (c_w, rho_w, alpha_w), (c_b, rho_b, alpha_b) = values
    if c_w != c_b or rho_w != rho_b or alpha_w != 0.0 or alpha_b != 0.0:
        return None
    return AnalyticIsoSpec(
        depth_h=env.big_h_m, speed=c_w, bc=env.bottom_bc, freq_hz=env.freq_hz
    )
