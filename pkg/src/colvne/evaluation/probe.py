"""
模块名称：probe
功能描述：冻结表征上的线性探针。单层线性分类器（带偏置）+ softmax 交叉熵，
         SGD 动量 0.9、无权重衰减，学习率按 epoch 余弦衰减；权重与打乱顺序由 seed 决定。
"""

import math
from dataclasses import dataclass

import numpy as np

from colvne.diffgraph import Graph, ops
from colvne.linalg import Tensor
from colvne.train.optim import sgd_step
from colvne.utils import Stream, keyed_generator

from .knn import topk_accuracy
from .models import EmbeddingBank


@dataclass(frozen=True)
class ProbeOptimizer:
    momentum: float = 0.9
    weight_decay: float = 0.0
    lars_enabled: bool = False


def _init_probe(dim: int, classes: int, seed: int) -> dict[str, Tensor]:
    limit = math.sqrt(6.0 / (dim + classes))
    rng = keyed_generator(seed, int(Stream.PROBE), 0)
    return {
        "probe.w": rng.uniform(-limit, limit, size=(dim, classes)),
        "probe.b": np.zeros(classes),
    }


def _probe_step(
    params: dict[str, Tensor], x: Tensor, y: np.ndarray, classes: int
) -> dict[str, Tensor]:
    g = Graph()
    w = g.param("probe.w", params["probe.w"])
    b = g.param("probe.b", params["probe.b"])
    logits = ops.add(ops.matmul(g.constant(x), w), b)
    onehot = np.zeros((x.shape[0], classes))
    onehot[np.arange(x.shape[0]), y] = 1.0
    logp = ops.log(ops.row_softmax(logits, 1.0))
    loss = ops.scale(ops.sum(ops.mul(g.constant(onehot), logp)), -1.0 / x.shape[0])
    return g.backward(loss)


def linear_probe(
    train_bank: EmbeddingBank,
    test_bank: EmbeddingBank,
    epochs: int = 100,
    lr: float = 0.1,
    batch_size: int = 256,
    seed: int = 0,
) -> tuple[float, float]:
    """
    训练线性探针并返回测试集 (top1, top5)。

    epochs=0 时直接评估随机初始化的分类层。
    """
    if len(train_bank) == 0 or len(test_bank) == 0:
        raise ValueError("线性探针的嵌入库不能为空")
    classes = max(train_bank.num_classes, test_bank.num_classes)
    params = _init_probe(train_bank.dim, classes, seed)
    buffers: dict[str, Tensor] = {}
    opt = ProbeOptimizer()
    n = len(train_bank)
    batch = min(batch_size, n)

    for epoch in range(epochs):
        epoch_lr = lr * 0.5 * (1.0 + math.cos(math.pi * epoch / epochs))
        order = keyed_generator(seed, int(Stream.PROBE), epoch + 1).permutation(n)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            grads = _probe_step(
                params, train_bank.embeddings[idx], train_bank.labels[idx], classes
            )
            sgd_step(params, grads, buffers, epoch_lr, opt)

    scores = test_bank.embeddings @ params["probe.w"] + params["probe.b"]
    return topk_accuracy(scores, test_bank.labels)
