"""
模块名称：diffgraph
功能描述：基于磁带的反向模式自动微分。提供计算图、原语集合（ops）与中心差分梯度校验，
         支持自定义 VJP（VNE 通过特征分解的解析梯度接入）。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from . import ops
    from .gradcheck import GraphBuilder, analytic_gradients, grad_check
    from .graph import Graph, GraphError, Node, RunningStats


__all__ = [
    "Graph",
    "GraphBuilder",
    "GraphError",
    "Node",
    "RunningStats",
    "analytic_gradients",
    "grad_check",
    "ops",
]

_LAZY = {
    "Graph": "graph",
    "GraphError": "graph",
    "Node": "graph",
    "RunningStats": "graph",
    "GraphBuilder": "gradcheck",
    "analytic_gradients": "gradcheck",
    "grad_check": "gradcheck",
}


def __getattr__(name: str) -> Any:
    import importlib

    if name == "ops":
        return importlib.import_module(".ops", __name__)
    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
