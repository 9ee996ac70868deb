"""
模块名称：checkpoint
功能描述：模型检查点的二进制读写。

文件布局（小端）:
    b"CVNE" | u32 版本号 | u32 JSON 长度 | JSON 描述
    | 参数 float64 数据块（登记顺序）| BN 滑动均值/方差 | 动量缓冲
    | u32 CRC32（覆盖之前全部字节）

JSON 描述包含结构配置、各数据块名称与形状，以及 epoch / global_step / seed。
"""

import json
import struct
import zlib
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from colvne.config import config
from colvne.diffgraph import RunningStats
from colvne.errors import CheckpointError, DataIOError
from colvne.utils import get_channel_logger

from .config import ArchitectureConfig
from .state import ModelState

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "model"
logger = get_channel_logger(LOG_FILE_DIR, "checkpoint")

MAGIC: bytes = b"CVNE"
FORMAT_VERSION: int = 1
_HEADER = struct.Struct("<4sII")
_CRC = struct.Struct("<I")
_F64 = np.dtype("<f8")


def _blob(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype=_F64).tobytes()


def checkpoint_bytes(state: ModelState) -> bytes:
    """把状态序列化为完整的检查点字节串（含末尾 CRC）。"""
    descriptor: dict[str, Any] = {
        "arch": state.arch.model_dump(mode="json"),
        "params": [[name, list(v.shape)] for name, v in state.params.items()],
        "stats": [[name, int(s.mean.size)] for name, s in state.bn_stats.items()],
        "buffers": [[name, list(v.shape)] for name, v in state.buffers.items()],
        "epoch": state.epoch,
        "global_step": state.global_step,
        "seed": state.seed,
    }
    meta = json.dumps(descriptor, ensure_ascii=False, sort_keys=True).encode("utf-8")
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, len(meta)), meta]
    parts.extend(_blob(v) for v in state.params.values())
    for stats in state.bn_stats.values():
        parts.append(_blob(stats.mean))
        parts.append(_blob(stats.var))
    parts.extend(_blob(v) for v in state.buffers.values())
    body = b"".join(parts)
    return body + _CRC.pack(zlib.crc32(body))


def checkpoint_save(state: ModelState, path: Path) -> Path:
    """
    写入检查点（先写临时文件再替换）。

    Raises:
        DataIOError: 路径不可写
    """
    path = Path(path)
    data = checkpoint_bytes(state)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError as e:
        raise DataIOError(f"检查点写入失败: {path} ({e})") from e
    logger.info(f"检查点已保存 | path={path} | epoch={state.epoch} | bytes={len(data)}")
    return path


def _take(data: bytes, offset: int, shape: tuple[int, ...]) -> tuple[np.ndarray, int]:
    count = int(np.prod(shape)) if shape else 1
    end = offset + count * _F64.itemsize
    if end > len(data):
        raise CheckpointError("检查点数据块被截断")
    values = np.frombuffer(data, dtype=_F64, count=count, offset=offset)
    return values.astype(np.float64).reshape(shape), end


def checkpoint_from_bytes(data: bytes) -> ModelState:
    """
    解析检查点字节串。

    Raises:
        CheckpointError: 魔数、版本、CRC 或布局不合法
    """
    if len(data) < _HEADER.size + _CRC.size:
        raise CheckpointError("检查点文件过短")
    body, (crc,) = data[: -_CRC.size], _CRC.unpack(data[-_CRC.size :])
    if zlib.crc32(body) != crc:
        raise CheckpointError("检查点 CRC 校验失败（文件损坏或被截断）")
    magic, version, meta_len = _HEADER.unpack_from(body, 0)
    if magic != MAGIC:
        raise CheckpointError(f"检查点魔数错误: {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"检查点版本不支持: {version}（当前 {FORMAT_VERSION}）")

    offset = _HEADER.size + meta_len
    try:
        descriptor = json.loads(body[_HEADER.size : offset].decode("utf-8"))
        arch = ArchitectureConfig.model_validate(descriptor["arch"])
    except (ValueError, KeyError, ValidationError) as e:
        raise CheckpointError(f"检查点描述无法解析: {e}") from e

    params: dict[str, np.ndarray] = {}
    for name, shape in descriptor["params"]:
        params[name], offset = _take(body, offset, tuple(shape))
    stats: dict[str, RunningStats] = {}
    for name, size in descriptor["stats"]:
        mean, offset = _take(body, offset, (size,))
        var, offset = _take(body, offset, (size,))
        stats[name] = RunningStats(mean=mean, var=var)
    buffers: dict[str, np.ndarray] = {}
    for name, shape in descriptor["buffers"]:
        buffers[name], offset = _take(body, offset, tuple(shape))
    if offset != len(body):
        raise CheckpointError(f"检查点尾部有 {len(body) - offset} 字节多余数据")

    return ModelState(
        arch=arch,
        params=params,
        bn_stats=stats,
        buffers=buffers,
        epoch=int(descriptor["epoch"]),
        global_step=int(descriptor["global_step"]),
        seed=int(descriptor["seed"]),
    )


def checkpoint_load(path: Path) -> ModelState:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DataIOError(f"检查点读取失败: {path} ({e})") from e
    state = checkpoint_from_bytes(data)
    logger.info(f"检查点已加载 | path={path} | epoch={state.epoch}")
    return state
