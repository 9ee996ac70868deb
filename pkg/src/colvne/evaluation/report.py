"""
模块名称：report
功能描述：对一个模型状态做完整评测（KNN、线性探针、塌缩诊断、聚类准确率），
         并把结果写成 "metric,value" 格式的 CSV。
"""

from pathlib import Path

import numpy as np
import pandas as pd

from colvne.config import config
from colvne.data.models import DatasetSplits
from colvne.errors import DataIOError
from colvne.model.network import EmbeddingSpace, embed, heads_forward
from colvne.model.state import ModelState
from colvne.utils import get_channel_logger

from .config import EvalConfig
from .diagnostics import cluster_accuracy, diagnose
from .knn import knn_eval
from .models import DiagnosticsReport, EmbeddingBank, EvaluationReport
from .probe import linear_probe

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "evaluation"
logger = get_channel_logger(LOG_FILE_DIR, "report")


def build_bank(
    state: ModelState, splits: DatasetSplits, space: EmbeddingSpace, val: bool
) -> EmbeddingBank:
    dataset = splits.val if val else splits.train
    features = embed(state, dataset.images, space)
    return EmbeddingBank.from_features(features, dataset.labels, splits.num_classes)


def evaluate_state(state: ModelState, splits: DatasetSplits, cfg: EvalConfig) -> EvaluationReport:
    """
    在验证集上评测：KNN 与诊断用 knn_space 表征，线性探针用 probe_space 表征，
    类别使用统计与聚类准确率基于 1×C 分类头。
    """
    knn_train = build_bank(state, splits, cfg.knn_space, val=False)
    knn_test = build_bank(state, splits, cfg.knn_space, val=True)
    knn_top1, knn_top5 = knn_eval(knn_train, knn_test, min(cfg.knn_k, len(knn_train)))

    if cfg.probe_space == cfg.knn_space:
        probe_train, probe_test = knn_train, knn_test
    else:
        probe_train = build_bank(state, splits, cfg.probe_space, val=False)
        probe_test = build_bank(state, splits, cfg.probe_space, val=True)
    probe_top1, probe_top5 = linear_probe(
        probe_train,
        probe_test,
        epochs=cfg.probe_epochs,
        lr=cfg.probe_lr,
        batch_size=cfg.probe_batch,
        seed=state.seed,
    )

    projections = (
        knn_test
        if cfg.knn_space == EmbeddingSpace.PROJECTION
        else build_bank(state, splits, EmbeddingSpace.PROJECTION, val=True)
    )
    head_logits = heads_forward(state, projections.embeddings)[state.arch.primary_head]
    diagnostics = diagnose(projections, head_logits)
    cluster_acc = cluster_accuracy(
        np.argmax(head_logits, axis=1), splits.val.labels, splits.num_classes
    )

    report = EvaluationReport(
        knn_top1=knn_top1,
        knn_top5=knn_top5,
        probe_top1=probe_top1,
        probe_top5=probe_top5,
        cluster_accuracy=cluster_acc,
        diagnostics=diagnostics,
    )
    logger.info(
        f"评测完成 | knn_top1={knn_top1:.4f} | probe_top1={probe_top1:.4f} | "
        f"eff_rank={diagnostics.effective_rank:.2f} | usage_H={diagnostics.class_usage_entropy:.3f}"
    )
    return report


def _write_rows(rows: list[tuple[str, float]], path: Path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(rows, columns=["metric", "value"])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
    except OSError as e:
        raise DataIOError(f"无法写出评测报告 {path}: {e}") from e
    return path


def write_report_csv(report: EvaluationReport, path: Path) -> Path:
    return _write_rows(report.rows(), path)


def write_spectrum_csv(diagnostics: DiagnosticsReport, path: Path) -> Path:
    """诊断 CSV：vne / effective_rank / 类别使用统计 + eig_i 行。"""
    rows = [
        ("vne", diagnostics.vne),
        ("effective_rank", diagnostics.effective_rank),
        ("class_usage_entropy", diagnostics.class_usage_entropy),
        ("majority_fraction", diagnostics.majority_fraction),
    ]
    rows.extend((f"eig_{i}", float(v)) for i, v in enumerate(diagnostics.spectrum))
    return _write_rows(rows, path)
