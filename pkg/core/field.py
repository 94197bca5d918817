"""
简正波声场合成与传播损失

    p(r, z) = i / (4ρ(z_s)) · Σ_m ψ_m(z_s) ψ_m(z) H0^(1)(k_rm r)
    TL = -20·log10(|p| / p_ref)，p_ref = 1/(4π)
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from core.cheb import barycentric_interpolate
from core.env_model import eval_profile
from core.errors import InvalidArgumentError, OutOfDomainError
from core.modal import ModeSet
from core.specfun import hankel1_0, hankel1_0_complex
from utils.config import FIELD_WORKERS, HANKEL_MODE

P_REF = 1.0 / (4.0 * math.pi)
HANKEL_MODES = ("factored", "exact")

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class TLGrid:
    """接收网格上的复声压与传播损失（行 = 深度，列 = 距离）"""

    ranges_m: np.ndarray
    depths_m: np.ndarray
    pressure: np.ndarray
    tl_db: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.tl_db.shape


def mode_at_depth(modes: ModeSet, z: float) -> np.ndarray:
    """
    在任意深度插值全部模态；z = h 时取水体一侧

    Raises:
        OutOfDomainError: z 不在 [0, H]
    """
    z = float(z)
    if not 0.0 <= z <= modes.env.big_h_m:
        raise OutOfDomainError(f"depth {z} outside [0, {modes.env.big_h_m}]")
    if z <= modes.env.h_m:
        return barycentric_interpolate(modes.grid_water, modes.modes_water, z)
    return barycentric_interpolate(modes.grid_bottom, modes.modes_bottom, z)


def modes_at_depths(modes: ModeSet, depths: ArrayLike) -> np.ndarray:
    """批量插值，返回 (深度数, 模态数)"""
    depths = np.atleast_1d(np.asarray(depths, dtype=float))
    h, big_h = modes.env.h_m, modes.env.big_h_m
    if np.any(depths < 0.0) or np.any(depths > big_h) or not np.all(np.isfinite(depths)):
        raise OutOfDomainError(f"receiver depth outside [0, {big_h}]")

    out = np.zeros((depths.size, modes.n_modes), dtype=complex)
    upper = depths <= h
    if np.any(upper):
        out[upper] = barycentric_interpolate(modes.grid_water, modes.modes_water, depths[upper])
    if np.any(~upper):
        out[~upper] = barycentric_interpolate(modes.grid_bottom, modes.modes_bottom, depths[~upper])
    return out


def _hankel_columns(kr: np.ndarray, ranges: np.ndarray, hankel_mode: str) -> np.ndarray:
    """(模态数, 距离数) 的 H0^(1)(kr·r)"""
    if hankel_mode == "exact":
        return hankel1_0_complex(kr[:, None] * ranges[None, :])
    # 小损耗近似：H0(a·r)·exp(-b·r)
    a = kr.real[:, None] * ranges[None, :]
    b = kr.imag[:, None] * ranges[None, :]
    return hankel1_0(a) * np.exp(-b)


def pressure_field(
    modes: ModeSet,
    zs: float,
    ranges: ArrayLike,
    depths: ArrayLike,
    workers: Optional[int] = None,
    hankel_mode: Optional[str] = None,
) -> np.ndarray:
    """
    模态求和合成复声压

    Args:
        modes: 归一化后的模态集
        zs: 声源深度 m
        ranges: 接收距离 m（全部 > 0）
        depths: 接收深度 m
        workers: 按距离分块的线程数，默认取 NMODE_FIELD_WORKERS
        hankel_mode: factored / exact，默认取 NMODE_HANKEL_MODE

    Returns:
        (深度数, 距离数) 复矩阵
    """
    ranges = np.atleast_1d(np.asarray(ranges, dtype=float))
    if np.any(~(ranges > 0.0)):
        raise OutOfDomainError("receiver ranges must be positive (H0 is singular at r = 0)")
    hankel_mode = (hankel_mode or HANKEL_MODE).lower()
    if hankel_mode not in HANKEL_MODES:
        raise InvalidArgumentError(
            f"unknown hankel mode '{hankel_mode}' (expected one of {', '.join(HANKEL_MODES)})"
        )
    workers = FIELD_WORKERS if workers is None else workers
    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")

    psi_src = mode_at_depth(modes, zs)
    rho_src = eval_profile(modes.env.layer_at(zs).rho, zs)
    psi_rcv = modes_at_depths(modes, depths)
    weights = psi_rcv * psi_src[None, :] * (1j / (4.0 * rho_src))
    kr = modes.wavenumbers

    def _chunk(r: np.ndarray) -> np.ndarray:
        return weights @ _hankel_columns(kr, r, hankel_mode)

    if workers == 1 or ranges.size < 2 * workers:
        return _chunk(ranges)

    chunks = np.array_split(ranges, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk, chunks))
    return np.hstack(parts)


def transmission_loss(
    pressure: np.ndarray,
    ranges: Optional[ArrayLike] = None,
    depths: Optional[ArrayLike] = None,
) -> TLGrid:
    """
    TL = -20·log10(|p|·4π)；|p| = 0 处为 +inf

    Raises:
        InvalidArgumentError: 声压含非有限值
    """
    pressure = np.atleast_2d(np.asarray(pressure, dtype=complex))
    if not np.all(np.isfinite(pressure)):
        raise InvalidArgumentError("pressure contains non-finite entries")

    magnitude = np.abs(pressure)
    tl = np.full(magnitude.shape, np.inf)
    nonzero = magnitude > 0.0
    tl[nonzero] = -20.0 * np.log10(magnitude[nonzero] / P_REF)

    n_depths, n_ranges = pressure.shape
    r = np.arange(n_ranges, dtype=float) if ranges is None else np.asarray(ranges, dtype=float)
    z = np.arange(n_depths, dtype=float) if depths is None else np.asarray(depths, dtype=float)
    return TLGrid(ranges_m=r, depths_m=z, pressure=pressure, tl_db=tl)
