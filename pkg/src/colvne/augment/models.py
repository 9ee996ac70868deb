"""
模块名称：models
功能描述：增强模块的数据结构：单张图像张量与单个样本的多裁剪视图集合。
"""

from dataclasses import dataclass

import numpy as np

from colvne.errors import ShapeError
from colvne.linalg import Tensor

# (3, H, W)，取值 [0, 1]
ImageTensor = Tensor

CHANNELS: int = 3


def check_image(img: ImageTensor) -> None:
    """校验图像为 (3, H, W) 且取值在 [0, 1]。"""
    if img.ndim != 3 or img.shape[0] != CHANNELS or img.shape[1] < 1 or img.shape[2] < 1:
        raise ShapeError(f"图像必须为 (3, H, W)，实际 shape={img.shape}")
    if img.size and (float(img.min()) < 0.0 or float(img.max()) > 1.0):
        raise ValueError(f"图像取值越界: [{float(img.min())}, {float(img.max())}]")


@dataclass(frozen=True)
class MultiCropBatch:
    """
    单个样本的多裁剪视图。前两个为全局视图，其余为局部视图。

    Attributes:
        views: 视图列表
        seed: 随机数根种子
        epoch: 所属 epoch
        index: 样本在数据集中的下标
    """

    views: tuple[ImageTensor, ...]
    seed: int
    epoch: int
    index: int

    @property
    def global_views(self) -> tuple[ImageTensor, ...]:
        return self.views[:2]

    @property
    def local_views(self) -> tuple[ImageTensor, ...]:
        return self.views[2:]

    def __len__(self) -> int:
        return len(self.views)

    def shapes(self) -> list[tuple[int, ...]]:
        return [tuple(np.shape(v)) for v in self.views]
