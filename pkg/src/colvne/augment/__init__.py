"""
模块名称：augment
功能描述：多裁剪随机数据增强（全局/局部视图 + 翻转、颜色抖动、高斯模糊），按样本键控随机流保证可复现。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .config import AugmentConfig
    from .models import ImageTensor, MultiCropBatch, check_image
    from .pipeline import augment_batch, augment_sample, multi_crop
    from .transforms import (
        center_view,
        color_jitter,
        gaussian_blur,
        random_flip,
        random_resized_crop,
        resize_bilinear,
    )


_LAZY = {
    "AugmentConfig": "config",
    "ImageTensor": "models",
    "MultiCropBatch": "models",
    "check_image": "models",
    "augment_batch": "pipeline",
    "augment_sample": "pipeline",
    "multi_crop": "pipeline",
    "center_view": "transforms",
    "color_jitter": "transforms",
    "gaussian_blur": "transforms",
    "random_flip": "transforms",
    "random_resized_crop": "transforms",
    "resize_bilinear": "transforms",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
