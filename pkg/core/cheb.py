"""
Chebyshev-Gauss-Lobatto (CGL) spectral primitives on an arbitrary interval [a, b].

Grid points ascend in depth (index 0 = shallowest):

    z_j = (a+b)/2 - (b-a)/2 * cos(j*pi/N),  j = 0..N

Everything here is a pure function of its inputs; grids and matrices are
read-only after construction and may be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from core.errors import InvalidArgumentError, OutOfDomainError


@dataclass(frozen=True)
class CglGrid:
    """N+1 CGL points on [a, b]"""

    n_order: int
    a: float
    b: float
    points: np.ndarray

    @property
    def size(self) -> int:
        return self.n_order + 1

    def contains(self, z: float) -> bool:
        return self.a <= z <= self.b


@dataclass(frozen=True)
class DiffMatrix:
    """Dense first-derivative matrix on a CglGrid"""

    grid: CglGrid
    entries: np.ndarray

    def __matmul__(self, other):
        return self.entries @ other


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _reference_points(n_order: int) -> np.ndarray:
    # sin form keeps the node set symmetric about 0 to the last bit
    j = np.arange(n_order + 1)
    return np.sin(np.pi * (2 * j - n_order) / (2 * n_order))


def cgl_points(n_order: int, a: float, b: float) -> CglGrid:
    """
    生成区间 [a, b] 上的 N+1 个 CGL 点（升序）

    Args:
        n_order: 截断阶数 N（>= 2）
        a: 区间起点（m）
        b: 区间终点（m）

    Returns:
        CglGrid，端点严格等于 a、b
    """
    if int(n_order) != n_order or n_order < 2:
        raise InvalidArgumentError(f"n_order must be an integer >= 2, got {n_order}")
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise InvalidArgumentError(f"interval must satisfy a < b, got [{a}, {b}]")

    n_order = int(n_order)
    x = _reference_points(n_order)
    points = 0.5 * (a + b) + 0.5 * (b - a) * x
    points[0] = a
    points[-1] = b
    return CglGrid(n_order=n_order, a=float(a), b=float(b), points=_freeze(points))


def diff_matrix(grid: CglGrid) -> DiffMatrix:
    """
    CGL 一阶微分矩阵

    在 [-1, 1] 上构造标准矩阵（非对角元 (c_i/c_j)(-1)^{i+j}/(x_i-x_j)），
    对角元取该行非对角元之和的相反数，再乘以 2/(b-a)。
    """
    n = grid.n_order
    x = _reference_points(n)

    c = np.ones(n + 1)
    c[0] = 2.0
    c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)

    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = np.outer(c, 1.0 / c) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))

    d *= 2.0 / (grid.b - grid.a)
    return DiffMatrix(grid=grid, entries=_freeze(d))


def quad_weights(grid: CglGrid) -> np.ndarray:
    """
    Clenshaw-Curtis 求积权重，对 N 次以内多项式精确

    Returns:
        长度 N+1 的正权重，和为 b-a
    """
    n = grid.n_order
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    interior = theta[1:-1]
    v = np.ones(n - 1)

    if n % 2 == 0:
        w[0] = w[-1] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k * k - 1)
        v -= np.cos(n * interior) / (n * n - 1)
    else:
        w[0] = w[-1] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k * k - 1)

    w[1:-1] = 2.0 * v / n
    # weights are symmetric, so the ascending reordering is a no-op
    return _freeze(w * 0.5 * (grid.b - grid.a))


def barycentric_weights(grid: CglGrid) -> np.ndarray:
    w = (-1.0) ** np.arange(grid.size)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def barycentric_interpolate(
    grid: CglGrid,
    values: np.ndarray,
    z_star: Union[float, np.ndarray],
) -> Union[complex, float, np.ndarray]:
    """
    重心插值（CGL 闭式权重）

    Args:
        grid: 插值网格
        values: 节点值，形状 (N+1,) 或 (N+1, M)
        z_star: 标量或一维数组，须落在 [a, b] 内

    Returns:
        标量输入返回 values 尾部形状的结果，数组输入在前面多一维
    """
    values = np.asarray(values)
    if values.shape[0] != grid.size:
        raise InvalidArgumentError(
            f"expected {grid.size} samples, got {values.shape[0]}"
        )

    scalar = np.ndim(z_star) == 0
    z = np.atleast_1d(np.asarray(z_star, dtype=float))
    if np.any(z < grid.a) or np.any(z > grid.b) or not np.all(np.isfinite(z)):
        raise OutOfDomainError(
            f"interpolation point outside [{grid.a}, {grid.b}]"
        )

    w = barycentric_weights(grid)
    diff = z[:, None] - grid.points[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    kernel = w[None, :] / diff

    flat = values.reshape(grid.size, -1)
    result = (kernel @ flat) / kernel.sum(axis=1)[:, None]

    hit_rows, hit_cols = np.nonzero(exact)
    if hit_rows.size:
        result[hit_rows] = flat[hit_cols]

    result = result.reshape((z.size,) + values.shape[1:])
    if scalar:
        return result[0]
    return result
