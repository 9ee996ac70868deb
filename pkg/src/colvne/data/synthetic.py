"""
模块名称：synthetic
功能描述：合成长尾纹理数据集。每个类别有固定的基色与正弦条纹（频率、方向随类别变化），
         每个样本叠加相位/方向扰动与高斯像素噪声后截断到 [0, 1]。

可复现性: 样本 (c, i) 的随机流为 (seed, Stream.DATA, c, i)；训练/验证划分的随机流为
(seed, Stream.SPLIT, c)，同一 seed 生成逐字节相同的数据集。
"""

import colorsys
import math
from pathlib import Path

import numpy as np

from colvne.augment import ImageTensor
from colvne.config import config
from colvne.errors import DataIOError
from colvne.utils import Stream, get_channel_logger, keyed_generator

from .config import LongTailSpec
from .models import Dataset, DatasetSplits, Split

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "data"
logger = get_channel_logger(LOG_FILE_DIR, "synthetic")

ORIENTATION_JITTER: float = 0.15
FREQ_JITTER: float = 0.1


def class_counts(spec: LongTailSpec) -> list[int]:
    """指数长尾：max(2, round(n_max · ρ^(−c/(C−1))))，0.5 向上取整。"""
    c_total = spec.num_classes
    return [
        max(2, int(math.floor(spec.n_max * spec.rho ** (-c / (c_total - 1)) + 0.5)))
        for c in range(c_total)
    ]


def _prototype(c: int, spec: LongTailSpec) -> tuple[np.ndarray, float, float]:
    """类别 c 的基色、条纹频率（每幅图周期数）与方向。"""
    hue = c / spec.num_classes
    base = np.array(colorsys.hsv_to_rgb(hue, 0.65, 0.8))
    freq = 1.5 + 1.25 * (c % 4)
    theta = math.pi * c / spec.num_classes
    return base, freq, theta


def texture_image(c: int, spec: LongTailSpec, rng: np.random.Generator) -> ImageTensor:
    base, freq, theta = _prototype(c, spec)
    size = spec.image_size
    phase = rng.uniform(0.0, 2.0 * math.pi)
    theta = theta + rng.uniform(-ORIENTATION_JITTER, ORIENTATION_JITTER)
    freq = freq * (1.0 + rng.uniform(-FREQ_JITTER, FREQ_JITTER))
    yy, xx = np.mgrid[0:size, 0:size] / size
    wave = 0.5 + 0.5 * np.sin(
        2.0 * math.pi * freq * (xx * math.cos(theta) + yy * math.sin(theta)) + phase
    )
    img = base[:, None, None] * (0.55 + 0.45 * wave[None, :, :])
    img = img + rng.normal(0.0, spec.noise, size=img.shape)
    return np.clip(img, 0.0, 1.0)


def generate_longtail(spec: LongTailSpec, seed: int) -> DatasetSplits:
    """
    生成长尾数据集并按类分层划分训练/验证集。

    Returns:
        DatasetSplits: 每个类别至少 1 个验证样本，其余进入训练集

    Raises:
        DataIOError: 某个类别样本数不足 2
    """
    counts = class_counts(spec)
    if min(counts) < 2:
        raise DataIOError(f"长尾配置产生了样本数不足 2 的类别: {counts}")

    train_images: list[ImageTensor] = []
    train_labels: list[int] = []
    val_images: list[ImageTensor] = []
    val_labels: list[int] = []
    for c, n in enumerate(counts):
        images = [
            texture_image(c, spec, keyed_generator(seed, int(Stream.DATA), c, i))
            for i in range(n)
        ]
        order = keyed_generator(seed, int(Stream.SPLIT), c).permutation(n)
        n_val = min(n - 1, max(1, int(math.floor(n * spec.val_fraction + 0.5))))
        for rank, i in enumerate(order):
            if rank < n_val:
                val_images.append(images[i])
                val_labels.append(c)
            else:
                train_images.append(images[i])
                train_labels.append(c)

    splits = DatasetSplits(
        train=Dataset(train_images, np.array(train_labels), spec.num_classes, Split.TRAIN),
        val=Dataset(val_images, np.array(val_labels), spec.num_classes, Split.VAL),
    )
    logger.info(
        f"合成长尾数据集 | classes={spec.num_classes} | counts={counts} | "
        f"train={len(splits.train)} | val={len(splits.val)} | seed={seed}"
    )
    return splits
