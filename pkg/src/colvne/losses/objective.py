"""
模块名称：objective
功能描述：总目标 = COL（关闭时为朴素交叉熵） − α·VNE。

训练时多视图、多分类头的配对项分别由 pair_loss_node 搭建，VNE 惩罚对整批所有视图的
投影表征只计算一次（vne_penalty_node），两者由训练循环组合。
"""

import numpy as np

from colvne.diffgraph import Graph, Node, ops
from colvne.linalg import Tensor, as_tensor

from .col import CrossViewTargets, LogitsPair, col_loss_node, naive_ssl_ce_node
from .config import LossConfig
from .entropy import autocorrelation, vne, vne_node


def pair_loss_node(
    s1: Node, s2: Node, targets: CrossViewTargets, cfg: LossConfig, tau_row: float | None = None
) -> Node:
    """一对视图的第一项：enable_col 时为 COL，否则为朴素交叉熵（以 s2 为目标）。"""
    tau = cfg.tau_row if tau_row is None else tau_row
    if cfg.enable_col:
        return col_loss_node(s1, s2, targets, cfg, tau_row=tau)
    return naive_ssl_ce_node(s1, targets.p2, tau)


def vne_penalty_node(h_all: Node, cfg: LossConfig) -> Node | None:
    """−α·S(Z)；关闭或 α=0 时返回 None。"""
    if not cfg.enable_vne or cfg.alpha == 0.0:
        return None
    return ops.scale(vne_node(h_all), -cfg.alpha)


def total_objective_node(
    s1: Node,
    s2: Node,
    h_all: Node,
    targets: CrossViewTargets,
    cfg: LossConfig,
    tau_row: float | None = None,
) -> Node:
    first = pair_loss_node(s1, s2, targets, cfg, tau_row=tau_row)
    penalty = vne_penalty_node(h_all, cfg)
    return first if penalty is None else ops.add(first, penalty)


def total_objective(pair: LogitsPair, h_all: Tensor, cfg: LossConfig) -> float:
    """
    总目标的取值版本。

    Args:
        pair: 两个视图的 logits
        h_all: 所有视图投影表征拼接后的 L2 归一化矩阵（M×d）
        cfg: 损失配置
    """
    g = Graph()
    s1 = g.constant(pair.s1)
    s2 = g.constant(pair.s2)
    targets = CrossViewTargets.from_pair(pair)
    first = pair_loss_node(s1, s2, targets, cfg, tau_row=pair.tau_row).item()
    if not cfg.enable_vne or cfg.alpha == 0.0:
        return first
    entropy = vne(autocorrelation(as_tensor(h_all)))
    return float(first - cfg.alpha * entropy)


def effective_rank(eigenvalues: Tensor) -> float:
    """exp(谱熵)，特征值先截断为非负并归一化。"""
    lam = np.clip(as_tensor(eigenvalues), 0.0, None)
    total = lam.sum()
    if total <= 0:
        return 0.0
    p = lam / total
    live = p > 1e-12
    return float(np.exp(-np.sum(p[live] * np.log(p[live]))))
