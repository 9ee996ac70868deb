"""
模块名称：diagnostics
功能描述：表征塌缩诊断：自相关矩阵特征值谱、VNE、有效秩 exp(VNE)，
         以及 1×C 分类头的类别使用直方图、熵、多数类占比与匈牙利匹配聚类准确率。
"""

import math

import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment

from colvne.linalg import Tensor, as_tensor, eigh_symmetric
from colvne.losses import autocorrelation, spectral_entropy

from .models import DiagnosticsReport, EmbeddingBank


def usage_histogram(predictions: npt.ArrayLike, classes: int) -> npt.NDArray[np.int64]:
    return np.bincount(np.asarray(predictions, dtype=np.int64), minlength=classes).astype(np.int64)


def usage_entropy(histogram: npt.NDArray[np.int64]) -> float:
    """直方图归一化后的 Shannon 熵（自然对数），0·log 0 = 0。"""
    total = int(histogram.sum())
    if total == 0:
        return 0.0
    p = histogram[histogram > 0] / total
    return float(-np.sum(p * np.log(p)))


def majority_fraction(predictions: npt.ArrayLike) -> float:
    pred = np.asarray(predictions, dtype=np.int64)
    if pred.size == 0:
        return 0.0
    return float(np.bincount(pred).max() / pred.size)


def cluster_accuracy(predictions: npt.ArrayLike, labels: npt.ArrayLike, classes: int) -> float:
    """
    无监督聚类准确率：预测簇与真实类别之间做一对一最优匹配（匈牙利算法）后的准确率。

    Args:
        predictions: 预测簇下标
        labels: 真实类别
        classes: 真实类别数
    """
    pred = np.asarray(predictions, dtype=np.int64)
    true = np.asarray(labels, dtype=np.int64)
    if pred.size == 0:
        return 0.0
    clusters = int(pred.max()) + 1
    contingency = np.zeros((clusters, max(classes, int(true.max()) + 1)), dtype=np.int64)
    np.add.at(contingency, (pred, true), 1)
    rows, cols = linear_sum_assignment(contingency, maximize=True)
    return float(contingency[rows, cols].sum() / pred.size)


def diagnose(bank: EmbeddingBank, head_logits: Tensor | None = None) -> DiagnosticsReport:
    """
    Args:
        bank: L2 归一化嵌入
        head_logits: 可选的 1×C 分类头 logits，用于类别使用统计
    """
    z = autocorrelation(bank.embeddings)
    spectrum = eigh_symmetric(z).eigenvalues
    entropy = spectral_entropy(spectrum)
    report = DiagnosticsReport(
        spectrum=spectrum, vne=entropy, effective_rank=float(math.exp(entropy))
    )
    if head_logits is not None:
        logits = as_tensor(head_logits)
        pred = np.argmax(logits, axis=1)
        report.class_usage = usage_histogram(pred, logits.shape[1])
        report.class_usage_entropy = usage_entropy(report.class_usage)
        report.majority_fraction = majority_fraction(pred)
    return report
