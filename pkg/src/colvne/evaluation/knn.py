"""
模块名称：knn
功能描述：加权 KNN 分类评测。相似度为余弦（单位向量点积），每个测试点取 k 个最近训练点，
         按类别累加相似度作为得分；并列一律取较小的下标。
"""

import numpy as np
import numpy.typing as npt

from colvne.errors import ShapeError

from .models import EmbeddingBank

TOP5: int = 5


def _stable_desc(values: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    """逐行降序排序的下标，相等时保持原顺序（较小下标在前）。"""
    return np.argsort(-values, axis=1, kind="stable")


def knn_scores(train_bank: EmbeddingBank, test_bank: EmbeddingBank, k: int) -> np.ndarray:
    """每个测试点的类别得分矩阵 (T, C)。"""
    if len(train_bank) == 0 or len(test_bank) == 0:
        raise ValueError("KNN 评测的嵌入库不能为空")
    if train_bank.dim != test_bank.dim:
        raise ShapeError(f"嵌入维度不一致: {train_bank.dim} vs {test_bank.dim}")
    if not 1 <= k <= len(train_bank):
        raise ValueError(f"k={k} 必须在 [1, {len(train_bank)}] 内")

    classes = max(train_bank.num_classes, test_bank.num_classes)
    sim = test_bank.embeddings @ train_bank.embeddings.T
    nearest = _stable_desc(sim)[:, :k]
    rows = np.repeat(np.arange(sim.shape[0]), k)
    cols = nearest.ravel()
    scores = np.zeros((sim.shape[0], classes))
    np.add.at(scores, (rows, train_bank.labels[cols]), sim[rows, cols])
    return scores


def topk_accuracy(scores: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """由得分矩阵计算 (top1, top5)；类别数不足 5 时 top5 覆盖全部类别。"""
    ranking = _stable_desc(scores)
    top1 = float(np.mean(ranking[:, 0] == labels))
    width = min(TOP5, scores.shape[1])
    top5 = float(np.mean(np.any(ranking[:, :width] == labels[:, None], axis=1)))
    return top1, top5


def knn_eval(
    train_bank: EmbeddingBank, test_bank: EmbeddingBank, k: int = 20
) -> tuple[float, float]:
    """
    Returns:
        tuple[float, float]: (top1, top5)，取值 [0, 1]

    Raises:
        ValueError: 嵌入库为空或 k 超过训练集大小
    """
    return topk_accuracy(knn_scores(train_bank, test_bank, k), test_bank.labels)
