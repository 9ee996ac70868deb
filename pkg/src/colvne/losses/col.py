"""
模块名称：col
功能描述：基于视图间交叉预测的聚类式自监督损失：
         - 朴素交叉熵（会坍缩到单一类别，作为消融基线）
         - 均匀先验损失及其对称版本（列 softmax 给出批内先验权重，阻止全部样本落入同一类）
         - 错误类别熵（Optimized Loss），把伪正确类之外的概率摊平
         - 两者组合的 COL：对称均匀先验 + β·错误类别熵，β = γ/(K−1)

每个损失都有两种形态：
    - *_node(...)：在 diffgraph 计算图上搭建，训练与梯度校验使用
    - 同名取值函数：接收 LogitsPair，内部构建一次性常量图求值

交叉视图目标（先验权重 w、目标分布、伪正确类 g）在 numpy 中算好后以常量接入图，
不回传梯度。
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from colvne.diffgraph import Graph, Node, ops
from colvne.errors import ShapeError
from colvne.linalg import Tensor, as_tensor

from .config import LossConfig

# 列和下限：logits 极端时整列 softmax 可能下溢为 0
COLSUM_FLOOR: float = 1e-300
# 1 − ŷ_g 小于该值的样本不计入错误类别熵
DENOM_FLOOR: float = 1e-12
ROW_SUM_TOL: float = 1e-9

IndexVector = npt.NDArray[np.int64]


# ────────────────────────────────────────────────────────────
# 数据结构
# ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LogitsPair:
    """同一批样本两个视图的 logits 及温度。"""

    s1: Tensor
    s2: Tensor
    tau_row: float = 0.1
    tau_col: float = 0.05

    def __post_init__(self) -> None:
        s1 = as_tensor(self.s1)
        s2 = as_tensor(self.s2)
        if s1.ndim != 2 or s1.shape != s2.shape:
            raise ShapeError(f"LogitsPair 两个视图形状必须一致且为二维: {s1.shape} vs {s2.shape}")
        n, c = s1.shape
        if n < 2 or c < 2:
            raise ShapeError(f"LogitsPair 要求 N ≥ 2 且 C ≥ 2，实际 N={n}, C={c}")
        if self.tau_row <= 0 or self.tau_col <= 0:
            raise ValueError(f"温度必须为正数: tau_row={self.tau_row}, tau_col={self.tau_col}")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def batch_size(self) -> int:
        return int(self.s1.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.s1.shape[1])

    def swapped(self) -> "LogitsPair":
        return LogitsPair(self.s2, self.s1, self.tau_row, self.tau_col)


def column_softmax(s: Tensor, temperature: float) -> Tensor:
    """按列（批维度）做 softmax(s/τ)，即每个类别在批内样本上的分布。"""
    return ops.softmax_rows(as_tensor(s).T, temperature).T


def prior_weights(s: Tensor, tau_col: float) -> Tensor:
    """
    均匀先验损失的样本权重 w_i(y) = p(v_i|y) / Σ_ỹ p(v_i|ỹ)。

    某行的列 softmax 全部下溢为 0 时，该样本权重为 0。
    """
    q = column_softmax(s, tau_col)
    row_sum = q.sum(axis=1, keepdims=True)
    return np.where(row_sum > 0, q / np.where(row_sum > 0, row_sum, 1.0), 0.0)


def argmax_lowest(p: Tensor) -> IndexVector:
    """逐行 argmax；并列时取最小类别下标。"""
    return np.argmax(as_tensor(p), axis=1).astype(np.int64)


@dataclass(frozen=True)
class CrossViewTargets:
    """
    一对视图的交叉目标，全部视为常量。

    Attributes:
        w12: ℓ(v1, v2) 的先验权重（由 s2 计算）
        w21: ℓ(v2, v1) 的先验权重（由 s1 计算）
        p1: 视图 1 的行 softmax
        p2: 视图 2 的行 softmax
        g1: 视图 1 的伪正确类
        g2: 视图 2 的伪正确类
    """

    w12: Tensor
    w21: Tensor
    p1: Tensor
    p2: Tensor
    g1: IndexVector
    g2: IndexVector

    @classmethod
    def from_logits(
        cls, s1: Tensor, s2: Tensor, tau_row: float, tau_col: float
    ) -> "CrossViewTargets":
        p1 = ops.softmax_rows(s1, tau_row)
        p2 = ops.softmax_rows(s2, tau_row)
        return cls(
            w12=prior_weights(s2, tau_col),
            w21=prior_weights(s1, tau_col),
            p1=p1,
            p2=p2,
            g1=argmax_lowest(p1),
            g2=argmax_lowest(p2),
        )

    @classmethod
    def from_pair(cls, pair: LogitsPair) -> "CrossViewTargets":
        return cls.from_logits(pair.s1, pair.s2, pair.tau_row, pair.tau_col)


def beta(gamma: float, k: int) -> float:
    """错误类别熵系数 β = γ/(K−1)。"""
    if k < 2:
        raise ValueError(f"beta 要求类别数 K ≥ 2，实际为 {k}")
    return gamma / (k - 1)


# ────────────────────────────────────────────────────────────
# 计算图版本
# ────────────────────────────────────────────────────────────


def naive_ssl_ce_node(s_pred: Node, target: Tensor, tau_row: float) -> Node:
    """−(1/N) Σ_i Σ_y target_i(y)·log softmax(s_pred/τ)_i(y)。"""
    n = s_pred.shape[0]
    logp = ops.log(ops.row_softmax(s_pred, tau_row))
    t = s_pred.graph.constant(target)
    return ops.scale(ops.sum(ops.mul(t, logp)), -1.0 / n)


def uniform_prior_node(s_pred: Node, weights: Tensor, tau_row: float) -> Node:
    """有向均匀先验损失 ℓ(v_pred, v_target)，weights 由目标视图的列 softmax 得到。"""
    n, c = s_pred.shape
    p = ops.row_softmax(s_pred, tau_row)
    col_sum = ops.shift(ops.sum(p, axis=0, keepdims=True), COLSUM_FLOOR)
    ratio = ops.scale(ops.div(p, col_sum), n / c)
    w = s_pred.graph.constant(weights)
    return ops.scale(ops.sum(ops.mul(w, ops.log(ratio))), -1.0 / n)


def symmetric_uniform_prior_node(
    s1: Node, s2: Node, targets: CrossViewTargets, tau_row: float
) -> Node:
    forward = uniform_prior_node(s1, targets.w12, tau_row)
    backward = uniform_prior_node(s2, targets.w21, tau_row)
    return ops.scale(ops.add(forward, backward), 0.5)


def optimized_incorrect_entropy_node(y_hat: Node, correct: IndexVector) -> Node:
    """
    错误类别熵 O = −(1/N) Σ_i Σ_{j≠g_i} q_ij log q_ij，q_ij = ŷ_ij / (1 − ŷ_ig)。

    Args:
        y_hat: N×K 行随机矩阵节点
        correct: 长度 N 的伪正确类下标（常量）
    """
    n, k = y_hat.shape
    if k < 2:
        raise ValueError(f"错误类别熵要求 K ≥ 2，实际为 {k}")
    correct = np.asarray(correct, dtype=np.int64)
    if correct.shape != (n,) or correct.min() < 0 or correct.max() >= k:
        raise ShapeError(f"伪正确类下标越界或长度不符: shape={correct.shape}, K={k}")

    g = y_hat.graph
    mask = np.zeros((n, k))
    mask[np.arange(n), correct] = 1.0
    y_correct = ops.sum(ops.mul(y_hat, g.constant(mask)), axis=1, keepdims=True)
    valid = ((1.0 - y_correct.value) > DENOM_FLOOR).astype(np.float64)

    # 无效样本分母固定为 1，最后再乘 valid 清零
    denom = ops.add(
        ops.mul(ops.shift(ops.scale(y_correct, -1.0), 1.0), g.constant(valid)),
        g.constant(1.0 - valid),
    )
    q = ops.div(ops.mul(y_hat, g.constant(1.0 - mask)), denom)
    per_sample = ops.sum(ops.mul(q, ops.log(q)), axis=1, keepdims=True)
    return ops.scale(ops.sum(ops.mul(per_sample, g.constant(valid))), -1.0 / n)


def col_loss_node(
    s1: Node, s2: Node, targets: CrossViewTargets, cfg: LossConfig, tau_row: float | None = None
) -> Node:
    """COL = 对称均匀先验 + β·½(O(ŷ₁, g₂) + O(ŷ₂, g₁))。"""
    tau = cfg.tau_row if tau_row is None else tau_row
    total = symmetric_uniform_prior_node(s1, s2, targets, tau)
    b = beta(cfg.gamma, s1.shape[1])
    if b == 0.0:
        return total
    o1 = optimized_incorrect_entropy_node(ops.row_softmax(s1, tau), targets.g2)
    o2 = optimized_incorrect_entropy_node(ops.row_softmax(s2, tau), targets.g1)
    return ops.add(total, ops.scale(ops.add(o1, o2), 0.5 * b))


# ────────────────────────────────────────────────────────────
# 取值版本
# ────────────────────────────────────────────────────────────


def _constants(pair: LogitsPair) -> tuple[Node, Node, CrossViewTargets]:
    g = Graph()
    return g.constant(pair.s1), g.constant(pair.s2), CrossViewTargets.from_pair(pair)


def naive_ssl_ce(pair: LogitsPair) -> float:
    """朴素交叉熵：以视图 2 的行 softmax 为目标预测视图 1。"""
    s1, _, targets = _constants(pair)
    return naive_ssl_ce_node(s1, targets.p2, pair.tau_row).item()


def uniform_prior_loss(pair: LogitsPair) -> float:
    """有向均匀先验损失 ℓ(v1, v2)。"""
    s1, _, targets = _constants(pair)
    return uniform_prior_node(s1, targets.w12, pair.tau_row).item()


def symmetric_uniform_prior_loss(pair: LogitsPair) -> float:
    s1, s2, targets = _constants(pair)
    return symmetric_uniform_prior_node(s1, s2, targets, pair.tau_row).item()


def optimized_incorrect_entropy(y_hat: Tensor, g: npt.ArrayLike) -> float:
    """
    错误类别熵的取值版本。

    Raises:
        ValueError: K < 2 或存在行和偏离 1 超过 1e-9 的行
    """
    y = as_tensor(y_hat)
    if y.ndim != 2:
        raise ShapeError(f"y_hat 必须是二维矩阵，实际 shape={y.shape}")
    if y.shape[1] < 2:
        raise ValueError(f"错误类别熵要求 K ≥ 2，实际为 {y.shape[1]}")
    worst = float(np.max(np.abs(y.sum(axis=1) - 1.0)))
    if worst > ROW_SUM_TOL:
        raise ValueError(f"y_hat 每行之和必须为 1，最大偏差 {worst:.3e}")
    node = Graph().constant(y)
    return optimized_incorrect_entropy_node(node, np.asarray(g, dtype=np.int64)).item()


def col_loss(pair: LogitsPair, cfg: LossConfig) -> float:
    s1, s2, targets = _constants(pair)
    return col_loss_node(s1, s2, targets, cfg, tau_row=pair.tau_row).item()
