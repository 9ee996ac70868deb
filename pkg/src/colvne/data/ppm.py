"""
模块名称：ppm
功能描述：二进制 PPM（P6）图像读写。只支持 maxval ≤ 255（每通道 1 字节）。
"""

from pathlib import Path

import numpy as np

from colvne.augment import ImageTensor
from colvne.errors import DataIOError

MAX_VALUE: int = 255
_WHITESPACE = b" \t\n\r\v\f"


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """跳过空白与 # 注释，读取下一个头部字段。"""
    n = len(data)
    while pos < n:
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\n\r":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
        pos += 1
    return data[start:pos], pos


def decode_ppm(data: bytes, name: str = "<bytes>") -> ImageTensor:
    """
    解析 P6 字节串为 (3, H, W) 的 [0, 1] 浮点图像。

    Raises:
        DataIOError: 头部损坏、尺寸非法或像素数据长度不符
    """
    magic, pos = _read_token(data, 0)
    if magic != b"P6":
        raise DataIOError(f"{name}: 不是 P6 格式的 PPM（magic={magic!r}）")
    fields: list[int] = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise DataIOError(f"{name}: PPM 头部字段非法 {token!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0 or not 0 < maxval <= MAX_VALUE:
        raise DataIOError(f"{name}: PPM 头部取值非法 width={width} height={height} maxval={maxval}")
    # 头部与像素之间恰好一个空白字符
    pos += 1
    expected = width * height * 3
    pixels = data[pos : pos + expected]
    if len(pixels) != expected:
        raise DataIOError(f"{name}: 像素数据长度 {len(pixels)}，期望 {expected}")
    arr = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)
    return arr.transpose(2, 0, 1).astype(np.float64) / maxval


def encode_ppm(img: ImageTensor) -> bytes:
    """把 (3, H, W) 的 [0, 1] 图像量化为 8 位 P6 字节串。"""
    if img.ndim != 3 or img.shape[0] != 3:
        raise DataIOError(f"只能写出 (3, H, W) 图像，实际 shape={img.shape}")
    _, h, w = img.shape
    q = np.clip(np.rint(img * MAX_VALUE), 0, MAX_VALUE).astype(np.uint8)
    header = f"P6\n{w} {h}\n{MAX_VALUE}\n".encode("ascii")
    return header + q.transpose(1, 2, 0).tobytes()


def read_ppm(path: Path) -> ImageTensor:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DataIOError(f"无法读取图像 {path}: {e}") from e
    return decode_ppm(data, path.name)


def write_ppm(img: ImageTensor, path: Path) -> None:
    try:
        Path(path).write_bytes(encode_ppm(img))
    except OSError as e:
        raise DataIOError(f"无法写出图像 {path}: {e}") from e
