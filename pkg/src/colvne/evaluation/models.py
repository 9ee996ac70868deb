"""
模块名称：models
功能描述：评测数据结构：嵌入库、塌缩诊断报告与完整评测报告。
"""

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from colvne.errors import ShapeError
from colvne.linalg import Tensor, as_tensor, l2_normalize_rows

UNIT_NORM_TOL: float = 1e-6


@dataclass(frozen=True)
class EmbeddingBank:
    """L2 归一化嵌入 + 对应标签。"""

    embeddings: Tensor
    labels: npt.NDArray[np.int64]
    num_classes: int

    def __post_init__(self) -> None:
        emb = as_tensor(self.embeddings)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "labels", labels)
        if emb.ndim != 2 or labels.shape != (emb.shape[0],):
            raise ShapeError(f"嵌入 {emb.shape} 与标签 {labels.shape} 不匹配")
        if emb.shape[0] and np.max(np.abs(np.linalg.norm(emb, axis=1) - 1.0)) > UNIT_NORM_TOL:
            raise ValueError("EmbeddingBank 的每一行必须是单位向量")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValueError(f"标签越界: 应在 [0, {self.num_classes})")

    @classmethod
    def from_features(
        cls, features: Tensor, labels: npt.ArrayLike, num_classes: int
    ) -> "EmbeddingBank":
        return cls(l2_normalize_rows(as_tensor(features)), np.asarray(labels), num_classes)

    def __len__(self) -> int:
        return int(self.embeddings.shape[0])

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])


@dataclass
class DiagnosticsReport:
    """
    Attributes:
        spectrum: 自相关矩阵降序特征值（和为 1）
        vne: 谱熵
        effective_rank: exp(vne)
        class_usage: 1×C 分类头 argmax 直方图（未提供 logits 时为空）
        class_usage_entropy: 直方图的 Shannon 熵
        majority_fraction: 最常用类别的占比
    """

    spectrum: Tensor
    vne: float
    effective_rank: float
    class_usage: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, np.int64))
    class_usage_entropy: float = 0.0
    majority_fraction: float = 0.0


@dataclass
class EvaluationReport:
    knn_top1: float
    knn_top5: float
    probe_top1: float
    probe_top5: float
    cluster_accuracy: float
    diagnostics: DiagnosticsReport

    def rows(self) -> list[tuple[str, float]]:
        """报告 CSV 的 (metric, value) 行，特征值谱展开为 eig_0..eig_{d-1}。"""
        diag = self.diagnostics
        rows = [
            ("knn_top1", self.knn_top1),
            ("knn_top5", self.knn_top5),
            ("probe_top1", self.probe_top1),
            ("probe_top5", self.probe_top5),
            ("cluster_accuracy", self.cluster_accuracy),
            ("vne", diag.vne),
            ("effective_rank", diag.effective_rank),
            ("class_usage_entropy", diag.class_usage_entropy),
            ("majority_fraction", diag.majority_fraction),
        ]
        rows.extend((f"eig_{i}", float(v)) for i, v in enumerate(diag.spectrum))
        return rows

    def summary(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.rows() if not k.startswith("eig_")}
