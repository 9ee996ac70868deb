"""
模块名称：models
功能描述：数据集容器。标签只供评测使用，训练循环只读取 images。
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from colvne.augment import ImageTensor
from colvne.errors import DataIOError, ShapeError


class Split(StrEnum):
    TRAIN = "train"
    VAL = "val"


@dataclass(frozen=True)
class Dataset:
    """
    Attributes:
        images: (3, H, W) 图像序列，取值 [0, 1]
        labels: 每张图像的类别下标
        num_classes: 类别数 C
        split: train / val
        names: 可选的文件名（从目录读入时保留）
    """

    images: Sequence[ImageTensor]
    labels: npt.NDArray[np.int64]
    num_classes: int
    split: Split = Split.TRAIN
    names: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "images", tuple(self.images))
        if labels.ndim != 1 or labels.size != len(self.images):
            raise ShapeError(f"标签数 {labels.size} 与图像数 {len(self.images)} 不一致")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise DataIOError(f"类别下标越界: 范围应为 [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.images)

    def class_counts(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.labels, minlength=self.num_classes).astype(np.int64)

    def check_trainable(self) -> None:
        """至少 2 个类别各有 ≥ 2 个样本。"""
        if int(np.sum(self.class_counts() >= 2)) < 2:
            raise DataIOError(f"{self.split} 集至少需要 2 个类别各有 2 个以上样本")

    def subset(self, indices: Sequence[int], split: Split | None = None) -> "Dataset":
        idx = [int(i) for i in indices]
        return Dataset(
            images=[self.images[i] for i in idx],
            labels=self.labels[idx],
            num_classes=self.num_classes,
            split=self.split if split is None else split,
            names=tuple(self.names[i] for i in idx) if self.names else (),
        )


@dataclass(frozen=True)
class DatasetSplits:
    train: Dataset
    val: Dataset

    @property
    def num_classes(self) -> int:
        return self.train.num_classes
