"""
模块名称：cli
功能描述：命令行入口与运行配置：gen-data / train / eval / diagnose / grad-check / ablate。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .ablation import AblationAxis, ablation_matrix, axis_cells, loss_axis_checks
    from .config import RunConfig
    from .gradcheck_suite import GradCheckResult, run_grad_suite, verify_gradients
    from .main import build_parser


_LAZY = {
    "AblationAxis": "ablation",
    "ablation_matrix": "ablation",
    "axis_cells": "ablation",
    "loss_axis_checks": "ablation",
    "RunConfig": "config",
    "GradCheckResult": "gradcheck_suite",
    "run_grad_suite": "gradcheck_suite",
    "verify_gradients": "gradcheck_suite",
    "build_parser": "main",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
