"""
模块名称：train
功能描述：自监督训练：学习率调度、SGD(+LARS) 更新、训练主循环、指标记录与断点续训。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .config import TrainConfig
    from .loop import checkpoint_path, load_data, multi_view_loss, train_run, train_step
    from .models import MetricsRecord, read_metrics, write_metrics
    from .optim import lr_at, sgd_step


_LAZY = {
    "TrainConfig": "config",
    "checkpoint_path": "loop",
    "load_data": "loop",
    "multi_view_loss": "loop",
    "train_run": "loop",
    "train_step": "loop",
    "MetricsRecord": "models",
    "read_metrics": "models",
    "write_metrics": "models",
    "lr_at": "optim",
    "sgd_step": "optim",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
