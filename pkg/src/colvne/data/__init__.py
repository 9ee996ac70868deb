"""
模块名称：data
功能描述：合成长尾纹理数据集、PPM 图像目录的导入导出与可复现的小批次划分。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .batching import batch_iter
    from .config import LongTailSpec
    from .folder import export_folder, export_splits, load_folder, load_splits, stratified_split
    from .models import Dataset, DatasetSplits, Split
    from .ppm import decode_ppm, encode_ppm, read_ppm, write_ppm
    from .synthetic import class_counts, generate_longtail


_LAZY = {
    "batch_iter": "batching",
    "LongTailSpec": "config",
    "export_folder": "folder",
    "export_splits": "folder",
    "load_folder": "folder",
    "load_splits": "folder",
    "stratified_split": "folder",
    "Dataset": "models",
    "DatasetSplits": "models",
    "Split": "models",
    "decode_ppm": "ppm",
    "encode_ppm": "ppm",
    "read_ppm": "ppm",
    "write_ppm": "ppm",
    "class_counts": "synthetic",
    "generate_longtail": "synthetic",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
