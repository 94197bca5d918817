"""
两层 Chebyshev 配点本征问题：离散、约束替换、Schur 约化、求解、筛选与归一化

未知量排列（物理顺序）::

    [ψ_w,0 … ψ_w,Nw, ψ_b,0 … ψ_b,Nb]

四个被替换的行/边界未知量位于 0、Nw、Nw+1、Nw+Nb+1。
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from core.cheb import CglGrid, DiffMatrix, cgl_points, diff_matrix, quad_weights
from core.eigen import EigenResult, eig_dense
from core.env_model import complex_wavenumber, eval_profile
from core.errors import (
    DegenerateConstraintsError,
    DegenerateModeError,
    InvalidArgumentError,
    NoPropagatingModesError,
)
from models.environment import BottomBC, EnvironmentSpec, LayerProfiles
from utils.config import L22_COND_LIMIT

# 符号约定：取深度顺序上第一个达到最大模（相对容差内）的分量为正
_SIGN_PIVOT_RTOL = 1e-6


@dataclass(frozen=True)
class DiscretizedLayer:
    """单层离散：C_ρ·D·C_{1/ρ}·D + C_{k²}"""

    grid: CglGrid
    diff: DiffMatrix
    rho: np.ndarray
    k2: np.ndarray
    operator: np.ndarray

    @property
    def n_order(self) -> int:
        return self.grid.n_order


@dataclass(frozen=True)
class ConstrainedSystem:
    """替换四行后的块对角系统 L̃ψ = kr²·diag(rhs_mask)ψ"""

    matrix: np.ndarray
    rhs_mask: np.ndarray
    constraint_rows: tuple[int, int, int, int]  # 海面、连续、通量、海底
    n_water: int
    n_bottom: int


@dataclass(frozen=True)
class SchurReduction:
    """消去四个边界未知量后的内部算子及恢复所需的块"""

    matrix: np.ndarray
    l21: np.ndarray
    l22: np.ndarray
    l22_lu: tuple[np.ndarray, np.ndarray]
    interior: np.ndarray
    boundary: np.ndarray
    n_water: int
    n_bottom: int


@dataclass
class ModeSet:
    """按 Re(kr) 降序排列的水平波数与两层节点上的模态"""

    freq_hz: float
    wavenumbers: np.ndarray
    modes_water: np.ndarray
    modes_bottom: np.ndarray
    water: DiscretizedLayer
    bottom: DiscretizedLayer
    env: EnvironmentSpec

    @property
    def n_modes(self) -> int:
        return int(self.wavenumbers.size)

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.freq_hz

    @property
    def grid_water(self) -> CglGrid:
        return self.water.grid

    @property
    def grid_bottom(self) -> CglGrid:
        return self.bottom.grid

    @property
    def phase_speeds(self) -> np.ndarray:
        return self.omega / self.wavenumbers.real

    def union_depths(self) -> np.ndarray:
        """两层节点合并，界面点只保留一次"""
        return np.concatenate([self.grid_water.points, self.grid_bottom.points[1:]])

    def union_modes(self) -> np.ndarray:
        return np.vstack([self.modes_water, self.modes_bottom[1:]])

    def norm_integrals(self) -> np.ndarray:
        """每个模态的 ∫ψ²/ρ dz（注意是 ψ² 而非 |ψ|²）"""
        return _norm_integrals(self.modes_water, self.modes_bottom, self.water, self.bottom)


def discretize_layer(
    profiles: LayerProfiles,
    a: float,
    b: float,
    n: int,
    omega: float,
) -> DiscretizedLayer:
    """
    在 [a, b] 上构造单层配点算子

    Args:
        profiles: 该层声速/密度/衰减剖面
        a, b: 层上下界（m）
        n: 截断阶数（>= 4）
        omega: 角频率 rad/s
    """
    if n < 4:
        raise InvalidArgumentError(f"truncation order must be >= 4, got {n}")
    grid = cgl_points(n, a, b)
    d = diff_matrix(grid)

    rho = eval_profile(profiles.rho, grid.points)
    c = eval_profile(profiles.ssp, grid.points)
    alpha = eval_profile(profiles.alpha, grid.points)
    k2 = complex_wavenumber(c, alpha, omega) ** 2

    dz = d.entries
    operator = (rho[:, None] * dz) @ (dz / rho[:, None]) + np.diag(k2)
    return DiscretizedLayer(grid=grid, diff=d, rho=rho, k2=k2, operator=operator)


def apply_constraints(
    water: DiscretizedLayer,
    bottom: DiscretizedLayer,
    bc: BottomBC,
) -> ConstrainedSystem:
    """
    拼装块对角矩阵并用边界/界面条件替换四行

    - 海面：ψ(0) = 0
    - 界面连续：ψ_w,Nw − ψ_b,0 = 0
    - 界面通量：γ1·(D_w 末行)ψ_w − γ2·(D_b 首行)ψ_b = 0，γ = 1/ρ
    - 海底：free → ψ(H) = 0；rigid → (D_b 末行)ψ_b = 0
    """
    if water.grid.b != bottom.grid.a:
        raise InvalidArgumentError(
            f"water layer ends at {water.grid.b} but bottom layer starts at {bottom.grid.a}"
        )

    nw = water.n_order
    nb = bottom.n_order
    size = nw + nb + 2
    w0 = 0
    b0 = nw + 1

    matrix = np.zeros((size, size), dtype=complex)
    matrix[w0 : w0 + nw + 1, w0 : w0 + nw + 1] = water.operator
    matrix[b0:, b0:] = bottom.operator

    surface_row = w0
    continuity_row = nw
    flux_row = b0
    bottom_row = size - 1

    matrix[surface_row, :] = 0.0
    matrix[surface_row, w0] = 1.0

    matrix[continuity_row, :] = 0.0
    matrix[continuity_row, nw] = 1.0
    matrix[continuity_row, b0] = -1.0

    gamma1 = 1.0 / water.rho[-1]
    gamma2 = 1.0 / bottom.rho[0]
    matrix[flux_row, :] = 0.0
    matrix[flux_row, w0 : w0 + nw + 1] = gamma1 * water.diff.entries[-1, :]
    matrix[flux_row, b0:] = -gamma2 * bottom.diff.entries[0, :]

    matrix[bottom_row, :] = 0.0
    if bc == BottomBC.FREE:
        matrix[bottom_row, size - 1] = 1.0
    else:
        matrix[bottom_row, b0:] = bottom.diff.entries[-1, :]

    rows = (surface_row, continuity_row, flux_row, bottom_row)
    rhs_mask = np.ones(size)
    rhs_mask[list(rows)] = 0.0
    return ConstrainedSystem(
        matrix=matrix,
        rhs_mask=rhs_mask,
        constraint_rows=rows,
        n_water=nw,
        n_bottom=nb,
    )


def schur_reduce(system: ConstrainedSystem) -> SchurReduction:
    """
    A = L11 − L12·L22⁻¹·L21，阶数 Nw+Nb−2

    Raises:
        DegenerateConstraintsError: L22 条件数超过上限
    """
    nw, nb = system.n_water, system.n_bottom
    boundary = np.array(system.constraint_rows)
    interior = np.concatenate(
        [np.arange(1, nw), np.arange(nw + 2, nw + nb + 1)]
    )

    m = system.matrix
    l11 = m[np.ix_(interior, interior)]
    l12 = m[np.ix_(interior, boundary)]
    l21 = m[np.ix_(boundary, interior)]
    l22 = m[np.ix_(boundary, boundary)]

    cond = np.linalg.cond(l22)
    if not np.isfinite(cond) or cond > L22_COND_LIMIT:
        raise DegenerateConstraintsError(
            f"constraint block is singular or ill-conditioned (cond={cond:.3e})"
        )
    lu = scipy.linalg.lu_factor(l22, check_finite=False)
    a = l11 - l12 @ scipy.linalg.lu_solve(lu, l21, check_finite=False)
    return SchurReduction(
        matrix=a,
        l21=l21,
        l22=l22,
        l22_lu=lu,
        interior=interior,
        boundary=boundary,
        n_water=nw,
        n_bottom=nb,
    )


def recover_boundary(psi1: np.ndarray, reduction: SchurReduction) -> np.ndarray:
    """
    ψ2 = −L22⁻¹·L21·ψ1

    Returns:
        [ψ_w,0, ψ_w,Nw, ψ_b,0, ψ_b,Nb]（psi1 为矩阵时按列）
    """
    psi1 = np.asarray(psi1)
    if psi1.shape[0] != reduction.interior.size:
        raise InvalidArgumentError(
            f"interior vector has length {psi1.shape[0]}, expected {reduction.interior.size}"
        )
    return -scipy.linalg.lu_solve(reduction.l22_lu, reduction.l21 @ psi1, check_finite=False)


def assemble_modes(
    psi1: np.ndarray, reduction: SchurReduction
) -> tuple[np.ndarray, np.ndarray]:
    """把内部分量与恢复出的边界值拼回两层节点顺序"""
    psi1 = np.atleast_2d(psi1.T).T
    nw, nb = reduction.n_water, reduction.n_bottom
    psi2 = recover_boundary(psi1, reduction)

    water = np.vstack([psi2[0:1], psi1[: nw - 1], psi2[1:2]])
    bottom = np.vstack([psi2[2:3], psi1[nw - 1 :], psi2[3:4]])
    return water, bottom


def filter_modes(
    raw: EigenResult, env: EnvironmentSpec
) -> tuple[np.ndarray, np.ndarray]:
    """
    按相速度窗口筛选特征对

    Returns:
        (kr, 内部特征向量列)，按 Re(kr) 降序

    Raises:
        NoPropagatingModesError: 窗口内没有模态
    """
    kr2 = raw.values
    keep = kr2.real > 0.0
    kr = np.sqrt(kr2[keep])
    vectors = raw.vectors[:, keep]
    # 主值分支已保证 Re >= 0；Im < 0 只来自舍入，取共轭使模态随距离衰减
    kr = np.where(kr.imag < 0.0, np.conj(kr), kr)

    cp = env.omega / kr.real
    window = (cp >= env.cp_min_mps) & (cp <= env.cp_max_mps)
    kr = kr[window]
    vectors = vectors[:, window]
    if kr.size == 0:
        raise NoPropagatingModesError(
            f"no propagating modes in phase-speed window "
            f"[{env.cp_min_mps:g}, {env.cp_max_mps:g}] m/s"
        )

    order = np.argsort(-kr.real, kind="stable")
    return kr[order], vectors[:, order]


def _norm_integrals(
    modes_water: np.ndarray,
    modes_bottom: np.ndarray,
    water: DiscretizedLayer,
    bottom: DiscretizedLayer,
) -> np.ndarray:
    ww = quad_weights(water.grid)
    wb = quad_weights(bottom.grid)
    return (ww / water.rho) @ (modes_water**2) + (wb / bottom.rho) @ (modes_bottom**2)


def _sign_fix(union: np.ndarray) -> np.ndarray:
    magnitude = np.abs(union)
    threshold = (1.0 - _SIGN_PIVOT_RTOL) * magnitude.max(axis=0)
    pivot_rows = np.argmax(magnitude >= threshold[None, :], axis=0)
    pivots = union[pivot_rows, np.arange(union.shape[1])]
    return np.where(pivots.real < 0.0, -1.0, 1.0)


def normalize_modes(modes: ModeSet) -> ModeSet:
    """
    按 ∫ψ²/ρ dz = 1 归一化（复数主值平方根），再做确定性符号约定

    ψ² 归一只确定到 ±1，因此符号约定只乘 ±1，不做复相位旋转。

    Raises:
        DegenerateModeError: |∫ψ²/ρ| < 1e-14
    """
    integrals = _norm_integrals(modes.modes_water, modes.modes_bottom, modes.water, modes.bottom)
    if np.any(np.abs(integrals) < 1e-14):
        bad = int(np.argmin(np.abs(integrals))) + 1
        raise DegenerateModeError(f"mode {bad} has a vanishing normalization integral")

    scale = 1.0 / np.sqrt(integrals.astype(complex))
    water = modes.modes_water * scale[None, :]
    bottom = modes.modes_bottom * scale[None, :]

    signs = _sign_fix(np.vstack([water, bottom[1:]]))
    modes.modes_water = water * signs[None, :]
    modes.modes_bottom = bottom * signs[None, :]
    return modes


def solve_modes(
    env: EnvironmentSpec,
    verbose: bool = False,
    n_water: Optional[int] = None,
    n_bottom: Optional[int] = None,
) -> ModeSet:
    """
    完整流程：离散两层 → 约束替换 → Schur 约化 → 稠密特征分解 →
    恢复边界 → 筛选 → 归一化

    Args:
        env: 环境
        verbose: 打印阶段日志
        n_water, n_bottom: 覆盖环境文件中的截断阶数
    """
    if n_water is not None or n_bottom is not None:
        env = env.model_copy(
            update={
                "n_water": n_water if n_water is not None else env.n_water,
                "n_bottom": n_bottom if n_bottom is not None else env.n_bottom,
            }
        )
    tag = f"[{env.title}]"
    omega = env.omega

    if verbose:
        print(f"{tag} 离散: f={env.freq_hz:g} Hz, N_w={env.n_water}, N_b={env.n_bottom}")
    water = discretize_layer(env.water, *env.water_bounds, env.n_water, omega)
    bottom = discretize_layer(env.bottom, *env.bottom_bounds, env.n_bottom, omega)

    system = apply_constraints(water, bottom, env.bottom_bc)
    reduction = schur_reduce(system)
    if verbose:
        print(f"{tag} Schur 约化: 内部阶数 {reduction.matrix.shape[0]}")

    matrix = reduction.matrix
    if not np.any(matrix.imag):
        # 无衰减时按实矩阵求解，物理模态的 kr² 精确为实数
        matrix = matrix.real
    if verbose:
        print(f"{tag} 特征分解: {matrix.shape[0]}x{matrix.shape[0]}")
    raw = eig_dense(matrix)

    kr, psi1 = filter_modes(raw, env)
    modes_water, modes_bottom = assemble_modes(psi1.astype(complex), reduction)
    if verbose:
        print(f"{tag} 保留模态: {kr.size}（相速度窗口 [{env.cp_min_mps:g}, {env.cp_max_mps:g}]）")

    modes = ModeSet(
        freq_hz=env.freq_hz,
        wavenumbers=kr,
        modes_water=modes_water,
        modes_bottom=modes_bottom,
        water=water,
        bottom=bottom,
        env=env,
    )
    normalize_modes(modes)
    if verbose:
        print(f"{tag} 归一化完成: kr_1 = {kr[0].real:.10f}{kr[0].imag:+.3e}i")
    return modes


def select_modes(modes: ModeSet, count: int) -> ModeSet:
    """取前 count 个模态（已按 Re(kr) 降序）"""
    return replace(
        modes,
        wavenumbers=modes.wavenumbers[:count],
        modes_water=modes.modes_water[:, :count],
        modes_bottom=modes.modes_bottom[:, :count],
    )
