"""
模块名称：ablation
功能描述：消融矩阵。沿一个轴展开若干配置，逐个训练并评测，汇总为一张 CSV（每个单元一行）。

轴定义：
    loss  : baseline（仅朴素交叉熵）/ +COL / +VNE / +COL+VNE
    batch : 32 / 64 / 128 / 256，超过训练集大小的取值截断并去重，截断记入 note 列
    temp  : τ_col ∈ {0.03, 0.05} × τ_row ∈ {0.07, 0.1}
    mlp   : 投影头 1×h / 2×h / 2×2h（h 为基准配置的隐藏层宽度）

所有单元共用同一份数据集与 seed，单元之间只有所列字段不同。
loss 轴的结果可用 loss_axis_checks 做方向性检查（baseline 塌缩、+COL+VNE 最优）。
"""

import math
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import pandas as pd

from colvne.config import config
from colvne.data import DatasetSplits
from colvne.errors import DataIOError
from colvne.evaluation import evaluate_state
from colvne.train import load_data, train_run
from colvne.utils import get_channel_logger

from .config import RunConfig

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "cli"
logger = get_channel_logger(LOG_FILE_DIR, "ablation")

BATCH_SIZES: tuple[int, ...] = (32, 64, 128, 256)
TAU_COLS: tuple[float, ...] = (0.03, 0.05)
TAU_ROWS: tuple[float, ...] = (0.07, 0.1)

ABLATION_COLUMNS: list[str] = [
    "axis",
    "cell",
    "knn_top1",
    "knn_top5",
    "probe_top1",
    "probe_top5",
    "cluster_accuracy",
    "effective_rank",
    "class_usage_entropy",
    "majority_fraction",
    "note",
]


class AblationAxis(StrEnum):
    LOSS = "loss"
    BATCH = "batch"
    TEMP = "temp"
    MLP = "mlp"


@dataclass(frozen=True)
class AblationCell:
    """消融矩阵的一个单元：名称 + 相对基准配置的覆盖字段。"""

    label: str
    overrides: dict[str, Any] = field(default_factory=dict)
    note: str = ""


# ────────────────────────────────────────────────────────────
# 轴展开
# ────────────────────────────────────────────────────────────


def _loss_cells() -> list[AblationCell]:
    flags = {
        "baseline": (False, False),
        "+COL": (True, False),
        "+VNE": (False, True),
        "+COL+VNE": (True, True),
    }
    return [
        AblationCell(label, {"loss": {"enable_col": col, "enable_vne": vne}})
        for label, (col, vne) in flags.items()
    ]


def _batch_cells(train_size: int) -> list[AblationCell]:
    cells: list[AblationCell] = []
    seen: set[int] = set()
    for requested in BATCH_SIZES:
        size = min(requested, train_size)
        if size in seen:
            continue
        seen.add(size)
        note = f"batch={requested} 超过训练集大小，截断为 {size}" if size != requested else ""
        cells.append(AblationCell(f"batch={size}", {"batch_size": size}, note))
    return cells


def _temp_cells() -> list[AblationCell]:
    return [
        AblationCell(
            f"tau_col={tau_col},tau_row={tau_row}",
            {"loss": {"tau_col": tau_col, "tau_row": tau_row}},
        )
        for tau_col in TAU_COLS
        for tau_row in TAU_ROWS
    ]


def _mlp_cells(hidden: int) -> list[AblationCell]:
    layouts = {"1xh": (1, hidden), "2xh": (2, hidden), "2x2h": (2, 2 * hidden)}
    return [
        AblationCell(
            f"{label}(h={width})", {"arch": {"proj_layers": layers, "proj_hidden": width}}
        )
        for label, (layers, width) in layouts.items()
    ]


def axis_cells(base: RunConfig, axis: AblationAxis, train_size: int) -> list[AblationCell]:
    match axis:
        case AblationAxis.LOSS:
            return _loss_cells()
        case AblationAxis.BATCH:
            return _batch_cells(train_size)
        case AblationAxis.TEMP:
            return _temp_cells()
        case AblationAxis.MLP:
            return _mlp_cells(base.arch.proj_hidden)
    raise ValueError(f"未知消融轴: {axis}")


# ────────────────────────────────────────────────────────────
# 执行
# ────────────────────────────────────────────────────────────


def _cell_dir(out_dir: Path, index: int) -> Path:
    return out_dir / f"cell_{index:02d}"


def run_cell(
    base: RunConfig, axis: AblationAxis, cell: AblationCell, splits: DatasetSplits, out_dir: Path
) -> dict[str, Any]:
    cfg = base.with_overrides(**cell.overrides)
    state, _ = train_run(cfg, out_dir=out_dir, splits=splits)
    report = evaluate_state(state, splits, cfg.eval)
    summary = report.summary()
    row: dict[str, Any] = {"axis": str(axis), "cell": cell.label, "note": cell.note}
    row.update({k: summary.get(k, math.nan) for k in ABLATION_COLUMNS if k in summary})
    logger.info(
        f"消融单元完成 | axis={axis} | cell={cell.label} | "
        f"knn_top1={summary['knn_top1']:.4f} | probe_top1={summary['probe_top1']:.4f}"
    )
    return row


def ablation_matrix(
    base: RunConfig, axis: AblationAxis, out_dir: Path, splits: DatasetSplits | None = None
) -> pd.DataFrame:
    """
    运行一条消融轴并写出 out_dir/ablation_<axis>.csv。

    Args:
        base: 基准配置
        axis: 消融轴
        out_dir: 输出目录；每个单元的训练产物写在 cell_XX/ 下
        splits: 预先加载的数据集，缺省按基准配置生成或读取

    Returns:
        pd.DataFrame: 每个单元一行，列见 ABLATION_COLUMNS
    """
    out_dir = Path(out_dir)
    splits = splits or load_data(base)
    cells = axis_cells(base, axis, len(splits.train))
    logger.info(f"开始消融 | axis={axis} | cells={len(cells)} | seed={base.seed}")

    rows = [
        run_cell(base, axis, cell, splits, _cell_dir(out_dir, i)) for i, cell in enumerate(cells)
    ]
    frame = pd.DataFrame(rows, columns=ABLATION_COLUMNS)
    path = out_dir / f"ablation_{axis}.csv"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
    except OSError as e:
        raise DataIOError(f"无法写出消融结果 {path}: {e}") from e
    return frame


# ────────────────────────────────────────────────────────────
# loss 轴方向性检查
# ────────────────────────────────────────────────────────────

COLLAPSE_MAJORITY: float = 0.8
COLLAPSE_RANK_FRACTION: float = 0.3
USAGE_ENTROPY_FRACTION: float = 0.8
FULL_RANK_FRACTION: float = 0.6
FULL_KNN_TOP1: float = 0.8


def loss_axis_checks(frame: pd.DataFrame, num_classes: int, embed_dim: int) -> dict[str, bool]:
    """
    loss 轴消融结果的方向性检查。

    Args:
        frame: ablation_matrix 在 loss 轴上的结果（需含 baseline 与 +COL+VNE 两行）
        num_classes: 类别数 C
        embed_dim: 投影维度 d

    Returns:
        dict[str, bool]: 检查项 → 是否通过
            baseline_collapses: majority_fraction ≥ 0.8 或 effective_rank ≤ 0.3·d
            full_usage_balanced: +COL+VNE 的类别使用熵 ≥ 0.8·ln C
            full_rank: +COL+VNE 的有效秩 ≥ 0.6·d
            full_knn: +COL+VNE 的 KNN top-1 ≥ 0.8
            full_knn_best: +COL+VNE 的 KNN top-1 不低于任何其他单元
    """
    rows = frame.set_index("cell")
    missing = {"baseline", "+COL+VNE"} - set(rows.index)
    if missing:
        raise ValueError(f"loss 轴结果缺少单元: {sorted(missing)}")
    baseline = rows.loc["baseline"]
    full = rows.loc["+COL+VNE"]
    return {
        "baseline_collapses": bool(
            baseline["majority_fraction"] >= COLLAPSE_MAJORITY
            or baseline["effective_rank"] <= COLLAPSE_RANK_FRACTION * embed_dim
        ),
        "full_usage_balanced": bool(
            full["class_usage_entropy"] >= USAGE_ENTROPY_FRACTION * math.log(num_classes)
        ),
        "full_rank": bool(full["effective_rank"] >= FULL_RANK_FRACTION * embed_dim),
        "full_knn": bool(full["knn_top1"] >= FULL_KNN_TOP1),
        "full_knn_best": bool(full["knn_top1"] >= rows["knn_top1"].max()),
    }
