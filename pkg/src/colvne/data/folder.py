"""
模块名称：folder
功能描述：磁盘图像目录的导入与导出。

目录约定:
    <dir>/*.ppm                 P6 图像
    <dir>/labels.csv            表头 "filename,class_index"，UTF-8，LF 换行
    <root>/train, <root>/val    划分好的数据集；若 root 下直接是图像，则按类分层 80/20 划分（seed 0）
"""

import math
from pathlib import Path

import numpy as np
import pandas as pd

from colvne.config import config
from colvne.errors import DataIOError
from colvne.utils import Stream, get_channel_logger, keyed_generator

from .models import Dataset, DatasetSplits, Split
from .ppm import read_ppm, write_ppm

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "data"
logger = get_channel_logger(LOG_FILE_DIR, "folder")

LABELS_FILE: str = "labels.csv"
LABEL_COLUMNS: list[str] = ["filename", "class_index"]
FLAT_SPLIT_SEED: int = 0
FLAT_VAL_FRACTION: float = 0.2


def _read_labels(path: Path) -> pd.DataFrame:
    labels_path = path / LABELS_FILE
    if not labels_path.is_file():
        raise DataIOError(f"缺少标签文件: {labels_path}")
    try:
        frame = pd.read_csv(labels_path, dtype={"filename": str}, encoding="utf-8")
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise DataIOError(f"标签文件无法解析: {labels_path} ({e})") from e
    if list(frame.columns) != LABEL_COLUMNS:
        raise DataIOError(f"标签文件表头应为 {','.join(LABEL_COLUMNS)}，实际 {list(frame.columns)}")
    if frame["filename"].duplicated().any():
        dup = sorted(frame.loc[frame["filename"].duplicated(), "filename"])
        raise DataIOError(f"标签文件存在重复文件名: {dup}")
    if not pd.api.types.is_integer_dtype(frame["class_index"]):
        raise DataIOError("class_index 列必须全部为整数")
    return frame


def load_folder(
    path: Path, num_classes: int | None = None, split: Split = Split.TRAIN
) -> Dataset:
    """
    读取一个图像目录。

    Args:
        path: 目录
        num_classes: 类别数；缺省取最大类别下标 + 1
        split: 数据集标签

    Raises:
        DataIOError: 标签缺失、文件缺失、PPM 损坏或类别下标越界
    """
    path = Path(path)
    if not path.is_dir():
        raise DataIOError(f"数据目录不存在: {path}")
    frame = _read_labels(path)

    listed = set(frame["filename"])
    on_disk = {p.name for p in path.glob("*.ppm")}
    missing_files = sorted(listed - on_disk)
    missing_rows = sorted(on_disk - listed)
    if missing_files:
        raise DataIOError(f"labels.csv 引用了不存在的文件: {missing_files}")
    if missing_rows:
        raise DataIOError(f"以下图像没有标签: {missing_rows}")

    labels = frame["class_index"].to_numpy(dtype=np.int64)
    if num_classes is not None:
        classes = num_classes
    else:
        classes = int(labels.max()) + 1 if labels.size else 0
    bad = frame.loc[(labels < 0) | (labels >= classes), "filename"].tolist()
    if bad:
        raise DataIOError(f"类别下标越界（C={classes}）: {bad}")

    images = [read_ppm(path / name) for name in frame["filename"]]
    logger.info(f"读取图像目录 | path={path} | images={len(images)} | classes={classes}")
    return Dataset(images, labels, classes, split, names=tuple(frame["filename"]))


def export_folder(dataset: Dataset, path: Path) -> Path:
    """把数据集写成 PPM + labels.csv；文件名沿用原名，没有则按序号命名。"""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataIOError(f"无法创建目录 {path}: {e}") from e
    names = dataset.names or tuple(f"img_{i:05d}.ppm" for i in range(len(dataset)))
    for name, img in zip(names, dataset.images, strict=True):
        write_ppm(img, path / name)
    frame = pd.DataFrame({"filename": list(names), "class_index": dataset.labels})
    try:
        frame.to_csv(path / LABELS_FILE, index=False, encoding="utf-8", lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"无法写出标签文件 {path / LABELS_FILE}: {e}") from e
    logger.info(f"导出图像目录 | path={path} | images={len(dataset)}")
    return path


def export_splits(splits: DatasetSplits, root: Path) -> Path:
    root = Path(root)
    export_folder(splits.train, root / Split.TRAIN.value)
    export_folder(splits.val, root / Split.VAL.value)
    return root


def stratified_split(dataset: Dataset, val_fraction: float, seed: int) -> DatasetSplits:
    """按类分层划分；每个类别至少留 1 个训练样本。"""
    train_idx: list[int] = []
    val_idx: list[int] = []
    for c in range(dataset.num_classes):
        members = np.flatnonzero(dataset.labels == c)
        if members.size == 0:
            continue
        order = members[keyed_generator(seed, int(Stream.SPLIT), c).permutation(members.size)]
        n_val = min(members.size - 1, int(math.floor(members.size * val_fraction + 0.5)))
        val_idx.extend(int(i) for i in order[:n_val])
        train_idx.extend(int(i) for i in order[n_val:])
    return DatasetSplits(
        train=dataset.subset(sorted(train_idx), Split.TRAIN),
        val=dataset.subset(sorted(val_idx), Split.VAL),
    )


def load_splits(root: Path) -> DatasetSplits:
    """
    读取划分好的数据根目录（train/ 与 val/），或把扁平目录按 80/20 分层划分。
    """
    root = Path(root)
    train_dir, val_dir = root / Split.TRAIN.value, root / Split.VAL.value
    if train_dir.is_dir():
        if not val_dir.is_dir():
            raise DataIOError(f"缺少验证集目录: {val_dir}")
        probe_train = _read_labels(train_dir)["class_index"]
        probe_val = _read_labels(val_dir)["class_index"]
        classes = int(max(probe_train.max(), probe_val.max())) + 1
        return DatasetSplits(
            train=load_folder(train_dir, classes, Split.TRAIN),
            val=load_folder(val_dir, classes, Split.VAL),
        )
    return stratified_split(load_folder(root), FLAT_VAL_FRACTION, FLAT_SPLIT_SEED)
