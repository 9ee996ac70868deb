"""
模块名称：linalg
功能描述：稠密矩阵基础算子与对称矩阵 Jacobi 特征分解，支撑 VNE 正则项与塌缩诊断。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .jacobi import eigh_symmetric
    from .models import EigenDecomposition, Tensor
    from .ops import (
        as_tensor,
        l2_normalize_rows,
        l2_normalize_rows_with_count,
        matmul,
        symmetrize,
    )


__all__ = [
    "EigenDecomposition",
    "Tensor",
    "as_tensor",
    "eigh_symmetric",
    "l2_normalize_rows",
    "l2_normalize_rows_with_count",
    "matmul",
    "symmetrize",
]

_LAZY = {
    "eigh_symmetric": "jacobi",
    "EigenDecomposition": "models",
    "Tensor": "models",
    "as_tensor": "ops",
    "l2_normalize_rows": "ops",
    "l2_normalize_rows_with_count": "ops",
    "matmul": "ops",
    "symmetrize": "ops",
}


def __getattr__(name: str) -> Any:
    if name in _LAZY:
        import importlib

        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
