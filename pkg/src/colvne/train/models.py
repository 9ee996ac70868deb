"""
模块名称：models
功能描述：训练过程记录：每个 epoch 一条 MetricsRecord，按 epoch 顺序追加写入 metrics.csv。
"""

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import pandas as pd

from colvne.errors import DataIOError


@dataclass(frozen=True)
class MetricsRecord:
    epoch: int
    total_loss: float
    col_loss: float
    vne: float
    effective_rank: float
    class_usage_entropy: float
    lr: float
    seconds: float
    knn_top1: float = math.nan


METRICS_COLUMNS: list[str] = [f.name for f in fields(MetricsRecord)]
# 墙钟时间不参与可复现性比较
NONDETERMINISTIC_COLUMNS: tuple[str, ...] = ("seconds",)


def write_metrics(records: list[MetricsRecord], path: Path) -> Path:
    frame = pd.DataFrame([asdict(r) for r in records], columns=METRICS_COLUMNS)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"无法写出训练指标 {path}: {e}") from e
    return path


def read_metrics(path: Path) -> list[MetricsRecord]:
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise DataIOError(f"无法读取训练指标 {path}: {e}") from e
    missing = [c for c in METRICS_COLUMNS if c not in frame.columns]
    if missing:
        raise DataIOError(f"训练指标缺少列: {missing}")
    records: list[MetricsRecord] = []
    for _, row in frame.iterrows():
        values = {c: float(row[c]) for c in METRICS_COLUMNS}
        values["epoch"] = int(row["epoch"])
        records.append(MetricsRecord(**values))  # type: ignore[arg-type]
    return records
