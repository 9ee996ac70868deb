"""
模块名称：transforms
功能描述：单张图像的基础变换：随机面积裁剪 + 双线性缩放、水平翻转、颜色抖动、5×5 高斯模糊，
         以及评测用的中心裁剪。所有随机变换都显式接收 numpy Generator，输出始终在 [0, 1]。
"""

import math

import numpy as np
from scipy import ndimage

from colvne.errors import ShapeError

from .models import ImageTensor

# 5×5 核：半径 2
BLUR_RADIUS: int = 2
ASPECT_RANGE: tuple[float, float] = (3.0 / 4.0, 4.0 / 3.0)
# ITU-R 601 灰度权重
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])


# ────────────────────────────────────────────────────────────
# 几何变换
# ────────────────────────────────────────────────────────────


def resize_bilinear(img: ImageTensor, height: int, width: int) -> ImageTensor:
    """双线性缩放到 (height, width)，像素中心对齐，边界取最近像素。"""
    _, h, w = img.shape
    if (h, w) == (height, width):
        return img.copy()
    ys = np.clip((np.arange(height) + 0.5) * h / height - 0.5, 0.0, h - 1)
    xs = np.clip((np.arange(width) + 0.5) * w / width - 0.5, 0.0, w - 1)
    grid = np.meshgrid(ys, xs, indexing="ij")
    out = np.stack(
        [ndimage.map_coordinates(ch, grid, order=1, mode="nearest") for ch in img]
    )
    return np.clip(out, 0.0, 1.0)


def random_resized_crop(
    img: ImageTensor,
    size: int,
    scale: tuple[float, float],
    rng: np.random.Generator,
) -> ImageTensor:
    """
    按面积比例随机裁剪后缩放到 size×size。

    面积比例在 scale 内均匀采样，宽高比在 [3/4, 4/3] 内对数均匀采样，越界时截断到原图尺寸。
    """
    _, h, w = img.shape
    if size > min(h, w):
        raise ShapeError(f"裁剪尺寸 {size} 超过图像尺寸 {h}×{w}")
    area = h * w * rng.uniform(scale[0], scale[1])
    ratio = math.exp(rng.uniform(math.log(ASPECT_RANGE[0]), math.log(ASPECT_RANGE[1])))
    cw = int(min(w, max(1, round(math.sqrt(area * ratio)))))
    ch = int(min(h, max(1, round(math.sqrt(area / ratio)))))
    top = int(rng.integers(0, h - ch + 1))
    left = int(rng.integers(0, w - cw + 1))
    return resize_bilinear(img[:, top : top + ch, left : left + cw], size, size)


def center_view(img: ImageTensor, size: int) -> ImageTensor:
    """不做增强的中心正方形裁剪，缩放到 size×size，供评测使用。"""
    _, h, w = img.shape
    side = min(h, w)
    top = (h - side) // 2
    left = (w - side) // 2
    return resize_bilinear(img[:, top : top + side, left : left + side], size, size)


def random_flip(
    img: ImageTensor,
    rng: np.random.Generator,
    p: float = 0.5,
    *,
    force: bool | None = None,
) -> ImageTensor:
    """以概率 p 水平翻转；force 非空时跳过采样直接按其决定。"""
    flip = bool(rng.random() < p) if force is None else force
    return img[:, :, ::-1].copy() if flip else img


# ────────────────────────────────────────────────────────────
# 光度变换
# ────────────────────────────────────────────────────────────


def _gray(img: ImageTensor) -> ImageTensor:
    return np.tensordot(GRAY_WEIGHTS, img, axes=(0, 0))


def color_jitter(
    img: ImageTensor,
    rng: np.random.Generator,
    strength: tuple[float, float] = (0.6, 1.4),
) -> ImageTensor:
    """依次按区间内均匀采样的因子缩放亮度、对比度、饱和度，最后截断到 [0, 1]。"""
    b, c, s = rng.uniform(strength[0], strength[1], size=3)
    out = img * b
    mean = float(_gray(out).mean())
    out = (out - mean) * c + mean
    gray = _gray(out)[None, :, :]
    out = (out - gray) * s + gray
    return np.clip(out, 0.0, 1.0)


def gaussian_blur(
    img: ImageTensor,
    rng: np.random.Generator,
    p: float = 0.5,
    sigma_range: tuple[float, float] = (0.1, 2.0),
) -> ImageTensor:
    """以概率 p 做 5×5 高斯模糊（σ 在区间内均匀采样），边界反射填充。"""
    # 无论是否模糊都消耗两个随机数
    apply = rng.random() < p
    sigma = rng.uniform(sigma_range[0], sigma_range[1])
    if not apply:
        return img
    out = ndimage.gaussian_filter(
        img, sigma=(0.0, sigma, sigma), mode="reflect", radius=BLUR_RADIUS
    )
    return np.clip(out, 0.0, 1.0)
