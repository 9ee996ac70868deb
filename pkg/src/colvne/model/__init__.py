"""
模块名称：model
功能描述：桌面规模的编码器（tiny-conv / mlp）+ 投影头 + 多个无偏置分类头，以及检查点读写。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .checkpoint import (
        checkpoint_bytes,
        checkpoint_from_bytes,
        checkpoint_load,
        checkpoint_save,
    )
    from .config import ArchitectureConfig, EncoderKind
    from .network import (
        EmbeddingSpace,
        ForwardOutput,
        Mode,
        bind_params,
        embed,
        encoder_forward,
        encoder_graph,
        forward_graph,
        heads_forward,
        heads_graph,
        predict_classes,
        projection_forward,
        projection_graph,
        to_encoder_input,
    )
    from .state import ModelState, init_model, parameter_count, parameter_shapes


_LAZY = {
    "checkpoint_bytes": "checkpoint",
    "checkpoint_from_bytes": "checkpoint",
    "checkpoint_load": "checkpoint",
    "checkpoint_save": "checkpoint",
    "ArchitectureConfig": "config",
    "EncoderKind": "config",
    "EmbeddingSpace": "network",
    "ForwardOutput": "network",
    "Mode": "network",
    "bind_params": "network",
    "embed": "network",
    "encoder_forward": "network",
    "encoder_graph": "network",
    "forward_graph": "network",
    "heads_forward": "network",
    "heads_graph": "network",
    "predict_classes": "network",
    "projection_forward": "network",
    "projection_graph": "network",
    "to_encoder_input": "network",
    "ModelState": "state",
    "init_model": "state",
    "parameter_count": "state",
    "parameter_shapes": "state",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
