"""
稠密一般复矩阵特征值分解（LAPACK geev：平衡 + Hessenberg + 隐式位移 QR）
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import InvalidArgumentError, NumericalFailureError
from utils.config import DEBUG_CHECKS, EIG_RESIDUAL_TOL


@dataclass(frozen=True)
class EigenResult:
    """右特征对；每列特征向量按最大模分量归一为 1"""

    values: np.ndarray
    vectors: np.ndarray

    def residuals(self, a: np.ndarray) -> np.ndarray:
        """每个特征对的 ‖A v − λ v‖∞"""
        r = a @ self.vectors - self.vectors * self.values[None, :]
        return np.abs(r).max(axis=0)


def _scale_columns(vectors: np.ndarray) -> np.ndarray:
    idx = np.abs(vectors).argmax(axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors / pivots[None, :]


def eig_dense(a: np.ndarray) -> EigenResult:
    """
    求稠密方阵的全部特征对（不排序，由调用方排序）

    Args:
        a: n×n 实或复矩阵，元素有限

    Raises:
        NumericalFailureError: QR 迭代不收敛
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidArgumentError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("matrix contains non-finite entries")

    n = a.shape[0]
    try:
        values, vectors = scipy.linalg.eig(a, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(
            f"eigenvalue iteration did not converge for a {n}x{n} matrix: {e}"
        ) from None

    result = EigenResult(values=values.astype(complex), vectors=_scale_columns(vectors))

    if DEBUG_CHECKS:
        norm = np.abs(a).sum(axis=1).max()
        worst = result.residuals(a).max()
        if worst > EIG_RESIDUAL_TOL * max(norm, 1.0):
            raise NumericalFailureError(
                f"eigen residual {worst:.3e} exceeds tolerance for a {n}x{n} matrix"
            )
    return result
