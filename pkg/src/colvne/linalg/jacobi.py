"""
模块名称：jacobi
功能描述：对称矩阵的循环 Jacobi 特征分解。核心旋转循环由 numba 编译，
         d ≤ 256 时精度可由重构误差直接验证，不依赖外部 LAPACK 的特征值接口。

算法要点:
    1. 输入先对称化 (Z + Zᵀ)/2
    2. 按 (p, q) 行优先顺序逐个清零非对角元，每轮为一次 sweep
    3. 最大非对角元 ≤ tol·max(1, max|diag|) 即收敛，最多 100 轮
    4. 特征值降序排列，特征向量列随之重排
"""

from pathlib import Path

import numpy as np
from numba import njit

from colvne.config import config
from colvne.errors import NumericalError, ShapeError
from colvne.utils import get_channel_logger

from .models import EigenDecomposition, Tensor
from .ops import as_tensor, symmetrize

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "linalg"
logger = get_channel_logger(LOG_FILE_DIR, "jacobi")

# ================= 默认配置 =================
OFFDIAG_TOL: float = 1e-12
MAX_SWEEPS: int = 100


@njit(cache=True)
def _max_offdiag(a: np.ndarray) -> float:
    n = a.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                v = abs(a[i, j])
                if v > worst:
                    worst = v
    return worst


@njit(cache=True)
def _jacobi_sweeps(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> tuple:
    """原地对 a 做循环 Jacobi 旋转，v 累积旋转矩阵。返回 (执行轮数, 最终非对角残差)。"""
    n = a.shape[0]
    sweeps = 0
    off = _max_offdiag(a)
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                # 取绝对值较小的根，保证旋转角 ≤ π/4
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    sign = 1.0 if theta >= 0.0 else -1.0
                    t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A ← A·J（列更新）
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                # A ← Jᵀ·A（行更新）
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                # V ← V·J
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
        off = _max_offdiag(a)
    return sweeps, off


def eigh_symmetric(
    z: Tensor, *, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS
) -> EigenDecomposition:
    """
    对称矩阵特征分解。

    Args:
        z: d×d 对称矩阵（对称误差 1e-9 以内，内部先对称化）
        tol: 非对角元收敛阈值（按对角元量级缩放）
        max_sweeps: 最大轮数

    Returns:
        EigenDecomposition: 降序特征值 + 正交特征向量

    Raises:
        ShapeError: 输入不是方阵
        NumericalError: 输入含 NaN/Inf，或 max_sweeps 轮后仍未收敛
    """
    z = as_tensor(z)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ShapeError(f"eigh_symmetric 需要方阵，实际为 {z.shape}")
    if not np.all(np.isfinite(z)):
        raise NumericalError("eigh_symmetric 输入包含 NaN/Inf")

    a = np.array(symmetrize(z), dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.float64)
    if n == 0:
        return EigenDecomposition(eigenvalues=np.zeros(0), eigenvectors=v)

    scaled_tol = tol * max(1.0, float(np.max(np.abs(np.diag(a)))))
    sweeps, residual = _jacobi_sweeps(a, v, scaled_tol, max_sweeps)
    if residual > scaled_tol:
        logger.error(f"Jacobi 未收敛 | d={n} | sweeps={sweeps} | residual={residual:.3e}")
        raise NumericalError(
            f"Jacobi 特征分解 {max_sweeps} 轮后未收敛，残差 {residual:.3e}", residual=residual
        )

    eigenvalues = np.diag(a).copy()
    # 降序；相等特征值保持原列顺序
    order = np.argsort(-eigenvalues, kind="stable")
    return EigenDecomposition(
        eigenvalues=eigenvalues[order],
        eigenvectors=np.ascontiguousarray(v[:, order]),
        sweeps=int(sweeps),
        residual=float(residual),
    )
