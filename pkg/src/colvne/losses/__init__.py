"""
模块名称：losses
功能描述：自监督目标的全部组成：朴素交叉熵、均匀先验损失、错误类别熵、COL、VNE 及其解析梯度，
         以及组合后的总目标。每项都同时提供取值函数与计算图节点版本。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .col import (
        CrossViewTargets,
        LogitsPair,
        beta,
        col_loss,
        col_loss_node,
        column_softmax,
        naive_ssl_ce,
        naive_ssl_ce_node,
        optimized_incorrect_entropy,
        optimized_incorrect_entropy_node,
        symmetric_uniform_prior_loss,
        symmetric_uniform_prior_node,
        uniform_prior_loss,
        uniform_prior_node,
    )
    from .config import LossConfig
    from .entropy import autocorrelation, spectral_entropy, vne, vne_backward, vne_node
    from .objective import (
        effective_rank,
        pair_loss_node,
        total_objective,
        total_objective_node,
        vne_penalty_node,
    )


_LAZY = {
    "CrossViewTargets": "col",
    "LogitsPair": "col",
    "beta": "col",
    "col_loss": "col",
    "col_loss_node": "col",
    "column_softmax": "col",
    "naive_ssl_ce": "col",
    "naive_ssl_ce_node": "col",
    "optimized_incorrect_entropy": "col",
    "optimized_incorrect_entropy_node": "col",
    "symmetric_uniform_prior_loss": "col",
    "symmetric_uniform_prior_node": "col",
    "uniform_prior_loss": "col",
    "uniform_prior_node": "col",
    "LossConfig": "config",
    "effective_rank": "objective",
    "pair_loss_node": "objective",
    "total_objective": "objective",
    "total_objective_node": "objective",
    "vne_penalty_node": "objective",
    "autocorrelation": "entropy",
    "spectral_entropy": "entropy",
    "vne": "entropy",
    "vne_backward": "entropy",
    "vne_node": "entropy",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
