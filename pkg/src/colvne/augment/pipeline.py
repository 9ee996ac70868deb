"""
模块名称：pipeline
功能描述：多裁剪视图生成。每个样本产生 2 个全局视图 + V 个局部视图，
         每个视图依次经过随机翻转、颜色抖动、高斯模糊。

可复现性:
    每个样本的随机流由 (seed, Stream.AUGMENT, epoch, index) 派生，
    因此结果与线程数、处理顺序无关。
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from colvne.config import config
from colvne.errors import ShapeError
from colvne.utils import Stream, get_channel_logger, keyed_generator

from .config import AugmentConfig
from .models import ImageTensor, MultiCropBatch
from .transforms import color_jitter, gaussian_blur, random_flip, random_resized_crop

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "augment"
logger = get_channel_logger(LOG_FILE_DIR, "pipeline")


def _finish_view(view: ImageTensor, rng: np.random.Generator, cfg: AugmentConfig) -> ImageTensor:
    view = random_flip(view, rng, cfg.flip_prob)
    view = color_jitter(view, rng, cfg.jitter)
    return gaussian_blur(view, rng, cfg.blur_prob, cfg.blur_sigma)


def multi_crop(
    img: ImageTensor,
    g: int,
    l: int,  # noqa: E741
    v: int,
    rng: np.random.Generator,
    cfg: AugmentConfig | None = None,
) -> list[ImageTensor]:
    """
    生成单张图像的多裁剪视图。

    Args:
        img: (3, H, W) 原图
        g: 全局视图边长
        l: 局部视图边长
        v: 局部视图数
        rng: 随机数流
        cfg: 其余增强参数（裁剪比例、抖动强度等），缺省用默认值

    Returns:
        list[ImageTensor]: 前 2 个为 (3, g, g)，其后 v 个为 (3, l, l)

    Raises:
        ShapeError: g 超过图像短边，或 l > g
    """
    cfg = cfg or AugmentConfig()
    _, h, w = img.shape
    if g > min(h, w):
        raise ShapeError(f"全局视图 {g} 超过图像尺寸 {h}×{w}")
    if l > g:
        raise ShapeError(f"局部视图 {l} 不能大于全局视图 {g}")
    if v < 0:
        raise ValueError(f"局部视图数不能为负: {v}")

    views: list[ImageTensor] = []
    for _ in range(2):
        crop = random_resized_crop(img, g, cfg.global_scale, rng)
        views.append(_finish_view(crop, rng, cfg))
    for _ in range(v):
        crop = random_resized_crop(img, l, cfg.local_scale, rng)
        views.append(_finish_view(crop, rng, cfg))
    return views


def augment_sample(
    img: ImageTensor, cfg: AugmentConfig, seed: int, epoch: int, index: int
) -> MultiCropBatch:
    """按 (seed, epoch, index) 派生随机流，生成一个样本的全部视图。"""
    rng = keyed_generator(seed, int(Stream.AUGMENT), epoch, index)
    views = multi_crop(img, cfg.global_size, cfg.local_size, cfg.local_views, rng, cfg)
    return MultiCropBatch(views=tuple(views), seed=seed, epoch=epoch, index=index)


def augment_batch(
    images: Sequence[ImageTensor],
    indices: Sequence[int],
    cfg: AugmentConfig,
    seed: int,
    epoch: int,
    threads: int | None = None,
) -> list[MultiCropBatch]:
    """
    并行增强一个批次，返回顺序与 indices 一致。

    Args:
        images: 整个数据集的图像
        indices: 本批样本下标
        threads: 线程数，缺省读取 COLVNE_THREADS
    """
    workers = config.worker_threads if threads is None else max(1, threads)
    logger.debug(f"增强批次 | epoch={epoch} | size={len(indices)} | threads={workers}")
    if workers == 1 or len(indices) <= 1:
        return [augment_sample(images[i], cfg, seed, epoch, int(i)) for i in indices]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(augment_sample, images[i], cfg, seed, epoch, int(i)) for i in indices
        ]
        return [f.result() for f in futures]
