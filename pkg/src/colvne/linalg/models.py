"""
模块名称：models
功能描述：线性代数子包的数据结构：Tensor 类型别名与对称矩阵特征分解结果。
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

# 全部内部计算使用 64 位浮点，row-major 布局由 numpy 保证
Tensor = npt.NDArray[np.float64]


@dataclass(frozen=True)
class EigenDecomposition:
    """
    对称矩阵的特征分解 Z = U·diag(λ)·Uᵀ。

    Attributes:
        eigenvalues:  长度 d，降序排列
        eigenvectors: d×d，第 j 列对应第 j 个特征值
        sweeps:       Jacobi 实际执行的轮数
        residual:     退出时最大非对角元绝对值
    """

    eigenvalues: Tensor
    eigenvectors: Tensor
    sweeps: int = 0
    residual: float = 0.0

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> Tensor:
        """返回 U·diag(λ)·Uᵀ，用于重构误差校验。"""
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T
