"""
模块名称：optim
功能描述：学习率调度（线性预热 + 余弦衰减）与带动量、权重衰减、可选 LARS 信任比的 SGD。
"""

import math
from collections.abc import Mapping, MutableMapping
from typing import Protocol

import numpy as np

from colvne.errors import NumericalError, ShapeError
from colvne.linalg import Tensor

from .config import TrainConfig

LARS_EPS: float = 1e-9
LARS_MAX_TRUST: float = 10.0


class SGDSettings(Protocol):
    momentum: float
    weight_decay: float
    lars_enabled: bool


def lr_at(step: int, steps_per_epoch: int, cfg: TrainConfig) -> float:
    """
    第 step 步（从 0 开始）的学习率。

    预热段从 start_lr 线性升到 peak_lr；之后按余弦从 peak_lr 降到 final_lr，
    最后一步恰好为 final_lr。
    """
    if step < 0:
        raise ValueError(f"step 不能为负: {step}")
    total = cfg.epochs * steps_per_epoch
    warmup = cfg.warmup_epochs * steps_per_epoch
    if step < warmup:
        return cfg.start_lr + (cfg.peak_lr - cfg.start_lr) * step / warmup
    progress = min(1.0, (step - warmup) / max(1, total - 1 - warmup))
    return cfg.final_lr + (cfg.peak_lr - cfg.final_lr) * (1.0 + math.cos(math.pi * progress)) / 2.0


def sgd_step(
    params: MutableMapping[str, Tensor],
    grads: Mapping[str, Tensor],
    buffers: MutableMapping[str, Tensor],
    lr: float,
    cfg: SGDSettings,
) -> None:
    """
    原地更新参数与动量缓冲：
        v ← m·v + g + wd·p
        p ← p − lr·trust·v

    LARS 开启时 trust = clip(‖p‖ / (‖g + wd·p‖ + 1e-9), 0, 10)，只作用于矩阵/卷积核，
    偏置与 BN 仿射参数保持 trust = 1。

    Raises:
        NumericalError: 任一梯度含 NaN/Inf（此时不修改任何参数）
        ShapeError: 梯度与参数形状不一致
    """
    for name, g in grads.items():
        if name not in params:
            raise ShapeError(f"梯度 {name} 没有对应的参数")
        if g.shape != params[name].shape:
            raise ShapeError(f"参数 {name} 梯度形状 {g.shape} != {params[name].shape}")
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"参数 {name} 的梯度出现 NaN/Inf")

    for name, g in grads.items():
        p = params[name]
        direction = g + cfg.weight_decay * p
        v = buffers.get(name)
        v = direction if v is None else cfg.momentum * v + direction
        buffers[name] = v
        trust = 1.0
        if cfg.lars_enabled and p.ndim >= 2:
            ratio = float(np.linalg.norm(p)) / (float(np.linalg.norm(direction)) + LARS_EPS)
            trust = min(max(ratio, 0.0), LARS_MAX_TRUST)
        params[name] = p - lr * trust * v
