"""
模块名称：ops
功能描述：稠密矩阵基础算子：矩阵乘、行 L2 归一化、对称化。全部为纯函数，可多线程并发调用。
"""

from pathlib import Path

import numpy as np

from colvne.config import config
from colvne.errors import ShapeError
from colvne.utils import get_channel_logger

from .models import Tensor

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "linalg"
logger = get_channel_logger(LOG_FILE_DIR, "linalg")

# 范数不超过该值的行视为零行
ZERO_NORM_EPS: float = 1e-12


def as_tensor(values: object) -> Tensor:
    """转换为 float64 的连续数组。"""
    return np.ascontiguousarray(values, dtype=np.float64)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """标准矩阵乘 (m×k)·(k×n) → (m×n)。"""
    a = as_tensor(a)
    b = as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul 仅支持二维矩阵: {a.shape} × {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul 内维不一致: {a.shape} × {b.shape}")
    return a @ b


def l2_normalize_rows_with_count(h: Tensor) -> tuple[Tensor, int]:
    """
    逐行 L2 归一化，并返回被替换的零行数量。

    零行（范数 ≤ ZERO_NORM_EPS）被替换为单位向量 e₁，训练不中断。
    """
    h = as_tensor(h)
    if h.ndim != 2:
        raise ShapeError(f"l2_normalize_rows 需要二维输入，实际为 {h.shape}")
    norms = np.linalg.norm(h, axis=1, keepdims=True)
    zero_rows = norms[:, 0] <= ZERO_NORM_EPS
    out = h / np.where(zero_rows[:, None], 1.0, norms)
    count = int(zero_rows.sum())
    if count:
        out[zero_rows] = 0.0
        out[zero_rows, 0] = 1.0
    return out, count


def l2_normalize_rows(h: Tensor) -> Tensor:
    """逐行 L2 归一化；出现零行时记录告警并以 e₁ 代替。"""
    out, count = l2_normalize_rows_with_count(h)
    if count:
        logger.warning(f"检测到零范数行，已替换为 e1 | zero_rows={count} | rows={out.shape[0]}")
    return out


def symmetrize(z: Tensor) -> Tensor:
    """返回 (Z + Zᵀ)/2。"""
    z = as_tensor(z)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ShapeError(f"对称化需要方阵，实际为 {z.shape}")
    return 0.5 * (z + z.T)
