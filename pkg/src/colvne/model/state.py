"""
模块名称：state
功能描述：模型状态容器与参数初始化。

参数登记表（有序字典，顺序即检查点中的写入顺序）:
    enc.conv{i}.w / enc.conv{i}.b / enc.bn{i}.gamma / enc.bn{i}.beta   tiny-conv 编码器
    enc.fc{i}.w / enc.fc{i}.b / enc.bn{i}.gamma / enc.bn{i}.beta       mlp 编码器
    proj.fc{i}.w / proj.fc{i}.b / proj.bn{i}.gamma / proj.bn{i}.beta   投影头隐藏层
    proj.out.w / proj.out.b                                            投影输出层
    head{h}.w                                                          分类头（d × classes_h，无偏置）

权重按 Glorot 均匀分布 ±√(6/(fan_in+fan_out)) 初始化，偏置为 0，BN 的 γ=1、β=0。
"""

from dataclasses import dataclass, field

import numpy as np

from colvne.diffgraph import RunningStats
from colvne.linalg import Tensor
from colvne.utils import Stream, keyed_generator

from .config import ArchitectureConfig, EncoderKind

KERNEL: int = 3


@dataclass
class ModelState:
    """
    可训练状态：参数、BN 滑动统计量、动量缓冲，以及断点续训所需的计数器。

    只由训练线程修改；评测前如需并发读取，先 copy()。
    """

    arch: ArchitectureConfig
    params: dict[str, Tensor]
    bn_stats: dict[str, RunningStats]
    buffers: dict[str, Tensor] = field(default_factory=dict)
    epoch: int = 0
    global_step: int = 0
    seed: int = 0

    def copy(self) -> "ModelState":
        return ModelState(
            arch=self.arch.model_copy(deep=True),
            params={k: v.copy() for k, v in self.params.items()},
            bn_stats={k: s.copy() for k, s in self.bn_stats.items()},
            buffers={k: v.copy() for k, v in self.buffers.items()},
            epoch=self.epoch,
            global_step=self.global_step,
            seed=self.seed,
        )

    def head_weights(self) -> list[Tensor]:
        return [self.params[f"head{h}.w"] for h in range(len(self.arch.head_sizes))]

    def all_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(v))) for v in self.params.values())


# ────────────────────────────────────────────────────────────
# 参数布局
# ────────────────────────────────────────────────────────────


def parameter_shapes(arch: ArchitectureConfig) -> dict[str, tuple[int, ...]]:
    """按登记顺序给出所有参数的形状。"""
    shapes: dict[str, tuple[int, ...]] = {}
    if arch.encoder == EncoderKind.TINY_CONV:
        c_in = arch.in_channels
        for i, c_out in enumerate(arch.encoder_widths):
            shapes[f"enc.conv{i}.w"] = (c_out, c_in, KERNEL, KERNEL)
            shapes[f"enc.conv{i}.b"] = (c_out,)
            shapes[f"enc.bn{i}.gamma"] = (c_out,)
            shapes[f"enc.bn{i}.beta"] = (c_out,)
            c_in = c_out
    else:
        fan_in = arch.in_channels * arch.input_size * arch.input_size
        for i, width in enumerate(arch.encoder_widths):
            shapes[f"enc.fc{i}.w"] = (fan_in, width)
            shapes[f"enc.fc{i}.b"] = (width,)
            shapes[f"enc.bn{i}.gamma"] = (width,)
            shapes[f"enc.bn{i}.beta"] = (width,)
            fan_in = width

    fan_in = arch.feature_dim
    for i in range(arch.proj_layers):
        shapes[f"proj.fc{i}.w"] = (fan_in, arch.proj_hidden)
        shapes[f"proj.fc{i}.b"] = (arch.proj_hidden,)
        shapes[f"proj.bn{i}.gamma"] = (arch.proj_hidden,)
        shapes[f"proj.bn{i}.beta"] = (arch.proj_hidden,)
        fan_in = arch.proj_hidden
    shapes["proj.out.w"] = (fan_in, arch.proj_out)
    shapes["proj.out.b"] = (arch.proj_out,)

    for h, classes in enumerate(arch.head_sizes):
        shapes[f"head{h}.w"] = (arch.proj_out, classes)
    return shapes


def bn_layer_sizes(arch: ArchitectureConfig) -> dict[str, int]:
    sizes = {f"enc.bn{i}": w for i, w in enumerate(arch.encoder_widths)}
    sizes.update({f"proj.bn{i}": arch.proj_hidden for i in range(arch.proj_layers)})
    return sizes


def parameter_count(arch: ArchitectureConfig) -> int:
    return int(sum(int(np.prod(s)) for s in parameter_shapes(arch).values()))


def _fans(shape: tuple[int, ...]) -> tuple[int, int]:
    if len(shape) == 4:
        receptive = shape[2] * shape[3]
        return shape[1] * receptive, shape[0] * receptive
    return shape[0], shape[1]


def init_model(arch: ArchitectureConfig, seed: int) -> ModelState:
    """按 (seed, Stream.INIT, 参数序号) 初始化全部参数。"""
    params: dict[str, Tensor] = {}
    for idx, (name, shape) in enumerate(parameter_shapes(arch).items()):
        if name.endswith(".gamma"):
            params[name] = np.ones(shape)
        elif name.endswith((".b", ".beta")):
            params[name] = np.zeros(shape)
        else:
            fan_in, fan_out = _fans(shape)
            limit = float(np.sqrt(6.0 / (fan_in + fan_out)))
            rng = keyed_generator(seed, int(Stream.INIT), idx)
            params[name] = rng.uniform(-limit, limit, size=shape)
    stats = {name: RunningStats.fresh(size) for name, size in bn_layer_sizes(arch).items()}
    return ModelState(arch=arch, params=params, bn_stats=stats, seed=seed)
