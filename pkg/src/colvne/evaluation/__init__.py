"""
模块名称：evaluation
功能描述：表征质量评测：加权 KNN、线性探针、塌缩诊断（特征值谱、VNE、有效秩、类别使用熵）
         与匈牙利匹配聚类准确率，结果写成 "metric,value" CSV。
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .config import EvalConfig
    from .diagnostics import (
        cluster_accuracy,
        diagnose,
        majority_fraction,
        usage_entropy,
        usage_histogram,
    )
    from .knn import knn_eval, knn_scores, topk_accuracy
    from .models import DiagnosticsReport, EmbeddingBank, EvaluationReport
    from .probe import linear_probe
    from .report import build_bank, evaluate_state, write_report_csv, write_spectrum_csv


_LAZY = {
    "EvalConfig": "config",
    "cluster_accuracy": "diagnostics",
    "diagnose": "diagnostics",
    "majority_fraction": "diagnostics",
    "usage_entropy": "diagnostics",
    "usage_histogram": "diagnostics",
    "knn_eval": "knn",
    "knn_scores": "knn",
    "topk_accuracy": "knn",
    "DiagnosticsReport": "models",
    "EmbeddingBank": "models",
    "EvaluationReport": "models",
    "linear_probe": "probe",
    "build_bank": "report",
    "evaluate_state": "report",
    "write_report_csv": "report",
    "write_spectrum_csv": "report",
}

__all__ = sorted(_LAZY)


def __getattr__(name: str) -> Any:
    import importlib

    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
