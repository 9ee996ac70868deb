"""
模块名称：network
功能描述：编码器 → 投影头 → 多分类头的前向计算。

两层接口:
    - *_graph(...)：在给定计算图上搭建，训练时配合 bind_params 求梯度
    - *_forward(...)：取值版本，内部使用常量图；评估模式下结果与批次组成无关

训练模式的 batch_norm 会原地更新 state.bn_stats。
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from colvne.augment import ImageTensor, center_view, resize_bilinear
from colvne.diffgraph import Graph, Node, ops
from colvne.errors import ShapeError
from colvne.linalg import Tensor, as_tensor

from .config import EncoderKind
from .state import ModelState

EMBED_BATCH: int = 256


class Mode(StrEnum):
    TRAIN = "train"
    EVAL = "eval"


class EmbeddingSpace(StrEnum):
    BACKBONE = "backbone"
    PROJECTION = "projection"


@dataclass
class ForwardOutput:
    features: Node
    projections: Node
    logits: list[Node]


def bind_params(graph: Graph, state: ModelState, *, trainable: bool = True) -> dict[str, Node]:
    """把全部参数登记到图上；trainable=False 时登记为常量。"""
    if trainable:
        return {name: graph.param(name, value) for name, value in state.params.items()}
    return {name: graph.constant(value, name) for name, value in state.params.items()}


# ────────────────────────────────────────────────────────────
# 图版本
# ────────────────────────────────────────────────────────────


def _bn(p: Mapping[str, Node], state: ModelState, key: str, x: Node, training: bool) -> Node:
    arch = state.arch
    return ops.batch_norm(
        x,
        p[f"{key}.gamma"],
        p[f"{key}.beta"],
        state.bn_stats[key],
        training=training,
        momentum=arch.bn_momentum,
        eps=arch.bn_eps,
    )


def encoder_graph(p: Mapping[str, Node], state: ModelState, x: Node, training: bool) -> Node:
    """x: (M, 3, S, S) → (M, feat)。"""
    arch = state.arch
    if x.value.ndim != 4 or x.shape[1] != arch.in_channels:
        raise ShapeError(f"编码器输入应为 (M, {arch.in_channels}, S, S)，实际 shape={x.shape}")
    if arch.encoder == EncoderKind.TINY_CONV:
        h = x
        for i in range(len(arch.encoder_widths)):
            h = ops.conv2d(h, p[f"enc.conv{i}.w"], p[f"enc.conv{i}.b"], stride=1, padding=1)
            h = _bn(p, state, f"enc.bn{i}", h, training)
            h = ops.leaky_relu(h, arch.leaky_slope)
            h = ops.max_pool2d(h, 2)
        return ops.mean(h, axis=(2, 3))

    expected = arch.input_size
    if x.shape[2:] != (expected, expected):
        raise ShapeError(f"mlp 编码器输入边长应为 {expected}，实际 {x.shape[2:]}")
    h = ops.reshape(x, (x.shape[0], -1))
    for i in range(len(arch.encoder_widths)):
        h = ops.add(ops.matmul(h, p[f"enc.fc{i}.w"]), p[f"enc.fc{i}.b"])
        h = _bn(p, state, f"enc.bn{i}", h, training)
        h = ops.leaky_relu(h, arch.leaky_slope)
    return h


def projection_graph(p: Mapping[str, Node], state: ModelState, feat: Node, training: bool) -> Node:
    """(linear → BN → leaky_relu) × proj_layers → linear → 行 L2 归一化。"""
    arch = state.arch
    h = feat
    for i in range(arch.proj_layers):
        h = ops.add(ops.matmul(h, p[f"proj.fc{i}.w"]), p[f"proj.fc{i}.b"])
        h = _bn(p, state, f"proj.bn{i}", h, training)
        h = ops.leaky_relu(h, arch.leaky_slope)
    z = ops.add(ops.matmul(h, p["proj.out.w"]), p["proj.out.b"])
    return ops.l2_normalize_rows(z)


def heads_graph(p: Mapping[str, Node], state: ModelState, z: Node) -> list[Node]:
    return [ops.matmul(z, p[f"head{h}.w"]) for h in range(len(state.arch.head_sizes))]


def forward_graph(
    p: Mapping[str, Node], state: ModelState, x: Node, training: bool
) -> ForwardOutput:
    feat = encoder_graph(p, state, x, training)
    z = projection_graph(p, state, feat, training)
    return ForwardOutput(features=feat, projections=z, logits=heads_graph(p, state, z))


# ────────────────────────────────────────────────────────────
# 取值版本
# ────────────────────────────────────────────────────────────


def _const_graph(state: ModelState, value: Tensor) -> tuple[dict[str, Node], Node]:
    g = Graph()
    return bind_params(g, state, trainable=False), g.constant(value)


def encoder_forward(state: ModelState, views: Tensor, mode: Mode = Mode.EVAL) -> Tensor:
    p, x = _const_graph(state, as_tensor(views))
    return encoder_graph(p, state, x, mode == Mode.TRAIN).value


def projection_forward(state: ModelState, feat: Tensor, mode: Mode = Mode.EVAL) -> Tensor:
    p, f = _const_graph(state, as_tensor(feat))
    return projection_graph(p, state, f, mode == Mode.TRAIN).value


def heads_forward(state: ModelState, z: Tensor) -> list[Tensor]:
    """logits_h = z · W_h，不带偏置。"""
    z = as_tensor(z)
    return [z @ w for w in state.head_weights()]


def to_encoder_input(views: Sequence[ImageTensor], size: int) -> Tensor:
    """把尺寸不一的视图双线性缩放到 size×size 后堆叠为 (M, 3, size, size)。"""
    if not views:
        raise ShapeError("视图列表为空")
    resized = [
        v if v.shape[1:] == (size, size) else resize_bilinear(v, size, size) for v in views
    ]
    return np.stack(resized).astype(np.float64, copy=False)


def embed(
    state: ModelState,
    images: Sequence[ImageTensor],
    space: EmbeddingSpace = EmbeddingSpace.PROJECTION,
    batch_size: int = EMBED_BATCH,
) -> Tensor:
    """
    评估模式下对中心裁剪视图编码。

    Returns:
        Tensor: backbone 为编码器特征，projection 为 L2 归一化的投影
    """
    size = state.arch.input_size
    chunks: list[Tensor] = []
    for start in range(0, len(images), batch_size):
        batch = [center_view(img, size) for img in images[start : start + batch_size]]
        p, x = _const_graph(state, to_encoder_input(batch, size))
        feat = encoder_graph(p, state, x, training=False)
        if space == EmbeddingSpace.BACKBONE:
            chunks.append(feat.value)
        else:
            chunks.append(projection_graph(p, state, feat, training=False).value)
    if not chunks:
        width = state.arch.feature_dim if space == EmbeddingSpace.BACKBONE else state.arch.proj_out
        return np.zeros((0, width))
    return np.concatenate(chunks, axis=0)


def predict_classes(state: ModelState, z: Tensor, head: int | None = None) -> np.ndarray:
    """某个分类头的 argmax 预测（默认 1×C 头），并列取最小类别下标。"""
    idx = state.arch.primary_head if head is None else head
    return np.argmax(heads_forward(state, z)[idx], axis=1)
