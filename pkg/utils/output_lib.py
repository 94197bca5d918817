"""
输出文件写入：CSV 表格与 8 位灰度 PGM

数字统一写成科学计数法、小写 e、固定有效位数，与区域设置无关，
同一输入两次运行得到逐字节相同的文件。
"""

from __future__ import annotations

import csv
import math
import os
from typing import Iterable, Sequence, Union

import numpy as np

from core.errors import InvalidArgumentError
from utils.config import SIG_DIGITS

Cell = Union[str, int, float]


def format_float(value: float, sig_digits: int = SIG_DIGITS) -> str:
    """12 位有效数字 -> '2.07069910900e-01'；inf -> 'inf'"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{sig_digits - 1}e}"


def _format_cell(cell: Cell) -> str:
    if isinstance(cell, str):
        return cell
    if isinstance(cell, (int, np.integer)) and not isinstance(cell, bool):
        return str(int(cell))
    return format_float(cell)


def parse_db_window(text: str) -> tuple[float, float]:
    """'40:100' -> (40.0, 100.0)"""
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidArgumentError(f"dB window must look like lo:hi, got '{text}'")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidArgumentError(f"dB window must look like lo:hi, got '{text}'") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidArgumentError(f"dB window needs finite lo < hi, got '{text}'")
    return lo, hi


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    """写 CSV（UTF-8，'\\n' 换行）"""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    return path


def write_tl_csv(path: str, ranges: np.ndarray, depths: np.ndarray, tl_db: np.ndarray) -> str:
    """表头为距离，首列为深度；行按深度自上而下"""
    header = ["z_m\\r_m"] + [format_float(r) for r in ranges]
    rows = ([z, *tl_row] for z, tl_row in zip(depths, tl_db))
    return write_csv(path, header, rows)


def tl_to_gray(tl_db: np.ndarray, db_window: tuple[float, float]) -> np.ndarray:
    """TL 在 [lo, hi] 内线性映射到 0..255，超出截断，inf 为白色"""
    lo, hi = db_window
    scaled = (np.asarray(tl_db, dtype=float) - lo) / (hi - lo)
    scaled = np.where(np.isinf(tl_db), 1.0, np.clip(scaled, 0.0, 1.0))
    return np.rint(scaled * 255.0).astype(np.uint8)


def write_pgm(path: str, tl_db: np.ndarray, db_window: tuple[float, float]) -> str:
    """二进制 P5：宽 = 距离数，高 = 深度数"""
    gray = tl_to_gray(tl_db, db_window)
    height, width = gray.shape
    _ensure_parent(path)
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(gray).tobytes())
    return path
