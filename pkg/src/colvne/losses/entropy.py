"""
模块名称：entropy
功能描述：表征自相关矩阵与 Von Neumann 熵（VNE），以及 VNE 关于表征矩阵 H 的解析梯度。

    Z = HᵀH / N                      （H 各行已 L2 归一化，trace(Z) = 1）
    S(Z) = −Σ_j λ_j log λ_j          （λ ≤ 1e-12 的项记为 0）
    ∂S/∂H = −(2/N)·H·U·diag(1 + log λ_j)·Uᵀ

VNE 以自定义节点接入计算图，不对 Jacobi 迭代本身求导（近简并特征值处病态）。
"""

import numpy as np

from colvne.diffgraph import Node, ops
from colvne.errors import NumericalError, ShapeError
from colvne.linalg import EigenDecomposition, Tensor, as_tensor, eigh_symmetric

# ================= 数值阈值 =================
EIG_FLOOR: float = 1e-12
NEGATIVE_EIG_TOL: float = -1e-8
UNIT_ROW_TOL: float = 1e-9
TRACE_TOL: float = 1e-6


def autocorrelation(h: Tensor, *, validate: bool = True) -> Tensor:
    """
    自相关矩阵 HᵀH/N。

    Raises:
        ShapeError: h 不是二维矩阵
        ValueError: validate=True 且存在非单位范数的行
    """
    h = as_tensor(h)
    if h.ndim != 2 or h.shape[0] == 0:
        raise ShapeError(f"autocorrelation 需要非空二维矩阵，实际 shape={h.shape}")
    if validate:
        norms = np.linalg.norm(h, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > UNIT_ROW_TOL:
            raise ValueError(f"autocorrelation 要求各行单位范数，最大偏差 {worst:.3e}")
    return (h.T @ h) / h.shape[0]


def spectral_entropy(eigenvalues: Tensor) -> float:
    """特征值谱的 Shannon 熵（自然对数），λ ≤ EIG_FLOOR 的项记为 0。"""
    lam = as_tensor(eigenvalues)
    if lam.size and float(lam.min()) < NEGATIVE_EIG_TOL:
        raise NumericalError(f"自相关矩阵出现负特征值 {float(lam.min()):.3e}")
    live = lam > EIG_FLOOR
    safe = np.where(live, lam, 1.0)
    return float(-np.sum(np.where(live, lam * np.log(safe), 0.0)))


def vne(z_auto: Tensor, *, validate: bool = True) -> float:
    """
    Von Neumann 熵 S = −Σ λ log λ。

    Args:
        z_auto: 对称半正定、迹为 1 的 d×d 矩阵
        validate: 是否校验迹为 1（有限差分等场景可关闭）
    """
    z = as_tensor(z_auto)
    if validate:
        trace = float(np.trace(z))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"vne 要求 trace(Z)=1，实际为 {trace:.9f}")
    return spectral_entropy(eigh_symmetric(z).eigenvalues)


def vne_gradient_factor(decomposition: EigenDecomposition) -> Tensor:
    """U·diag(1 + log λ)·Uᵀ，λ ≤ EIG_FLOOR 的对角项置 0。"""
    lam = decomposition.eigenvalues
    u = decomposition.eigenvectors
    live = lam > EIG_FLOOR
    coeff = np.where(live, 1.0 + np.log(np.where(live, lam, 1.0)), 0.0)
    return (u * coeff) @ u.T


def vne_backward(
    h: Tensor, upstream: float, decomposition: EigenDecomposition | None = None
) -> Tensor:
    """
    upstream · ∂S/∂H，其中 S = vne(autocorrelation(H))。

    Args:
        h: N×d 表征矩阵
        upstream: 上游标量梯度
        decomposition: 可复用的 Z 特征分解，缺省时现算
    """
    h = as_tensor(h)
    if upstream == 0.0:
        return np.zeros_like(h)
    if decomposition is None:
        decomposition = eigh_symmetric(autocorrelation(h, validate=False))
    n = h.shape[0]
    return float(upstream) * (-2.0 / n) * (h @ vne_gradient_factor(decomposition))


def vne_node(h: Node) -> Node:
    """
    VNE 自定义计算图节点：输入为 L2 归一化后的表征（M×d），输出标量 S。

    节点 meta 中保存降序特征值谱，供训练过程计算有效秩。
    """
    hv = h.value
    if hv.ndim != 2:
        raise ShapeError(f"vne 节点需要二维输入，实际 shape={hv.shape}")
    decomposition = eigh_symmetric(autocorrelation(hv, validate=False))
    value = spectral_entropy(decomposition.eigenvalues)

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [vne_backward(hv, float(g), decomposition)]

    node = ops.custom("vne", [h], np.asarray(value), vjp)
    node.meta["eigenvalues"] = decomposition.eigenvalues
    return node
