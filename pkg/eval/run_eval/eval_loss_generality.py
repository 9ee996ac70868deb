"""
模块名称：eval_loss_generality
功能描述：损失项在不同长尾数据集上的一致性验证。对每个数据集、每个 seed 运行 loss 轴消融
         （baseline / +COL / +VNE / +COL+VNE），汇总 KNN 与线性探针 top-1 的均值与标准差。

检查项（方向性，不比较绝对数值）：
    - +COL+VNE 的 KNN top-1 不低于 baseline
    - 含 VNE 的单元有效秩高于对应的不含 VNE 单元

数据集（合成长尾纹理，桌面规模）：
    balanced   C=6, ρ=1      对照组
    longtail   C=6, ρ=10     默认长尾
    steep      C=8, ρ=20     更陡的长尾

输出：
    data/eval/results/loss_generality_result.json   聚合结果
    data/eval/results/<dataset>/seed_<s>/ablation_loss.csv   每次运行的消融表
"""

import json
from pathlib import Path
from typing import Any

import pandas as pd
from tqdm import tqdm

from colvne.cli import AblationAxis, RunConfig, ablation_matrix
from colvne.config import config
from colvne.utils import get_channel_logger

# ================= 日志 =================
logger = get_channel_logger(config.LOG_DIR / "eval", "eval_loss_generality")

# ================= 路径配置 =================
RESULTS_DIR = config.DATA_DIR / "eval" / "results"
OUTPUT_PATH = RESULTS_DIR / "loss_generality_result.json"

# ================= 实验配置 =================
SEEDS: tuple[int, ...] = (0, 1, 2)
DATASETS: dict[str, dict[str, Any]] = {
    "balanced": {"num_classes": 6, "n_max": 120, "rho": 1.0},
    "longtail": {"num_classes": 6, "n_max": 200, "rho": 10.0},
    "steep": {"num_classes": 8, "n_max": 200, "rho": 20.0},
}
BASE_CONFIG: dict[str, Any] = {
    "epochs": 20,
    "warmup_epochs": 2,
    "batch_size": 64,
    "augment": {"global_size": 32, "local_size": 16, "local_views": 2},
    "arch": {"encoder_widths": [16, 32, 64], "proj_hidden": 128, "proj_out": 32},
    "eval": {"knn_k": 20, "probe_epochs": 50, "online_knn": False},
}
METRICS: tuple[str, ...] = ("knn_top1", "probe_top1", "effective_rank", "class_usage_entropy")


# ────────────────────────────────────────────────────────────
# 运行
# ────────────────────────────────────────────────────────────


def _run_config(dataset: dict[str, Any], seed: int) -> RunConfig:
    return RunConfig.from_mapping(
        {**BASE_CONFIG, "longtail": {**dataset, "image_size": 32}, "seed": seed},
        source="eval_loss_generality",
    )


def _aggregate(frame: pd.DataFrame) -> dict[str, dict[str, dict[str, float]]]:
    """按 (dataset, cell) 聚合 → {dataset: {cell: {metric_mean, metric_std}}}。"""
    grouped = frame.groupby(["dataset", "cell"], sort=False)[list(METRICS)].agg(["mean", "std"])
    result: dict[str, dict[str, dict[str, float]]] = {}
    for (dataset, cell), row in grouped.iterrows():
        stats = {f"{m}_{s}": round(float(row[(m, s)]), 4) for m in METRICS for s in ("mean", "std")}
        result.setdefault(str(dataset), {})[str(cell)] = stats
    return result


def _directional_checks(summary: dict[str, dict[str, dict[str, float]]]) -> dict[str, bool]:
    checks: dict[str, bool] = {}
    for dataset, cells in summary.items():
        checks[f"{dataset}.col_vne_vs_baseline_knn"] = (
            cells["+COL+VNE"]["knn_top1_mean"] >= cells["baseline"]["knn_top1_mean"]
        )
        checks[f"{dataset}.vne_raises_rank"] = (
            cells["+VNE"]["effective_rank_mean"] > cells["baseline"]["effective_rank_mean"]
            and cells["+COL+VNE"]["effective_rank_mean"] > cells["+COL"]["effective_rank_mean"]
        )
    return checks


def run_eval(output_path: Path = OUTPUT_PATH) -> dict[str, Any]:
    runs = [(name, spec, seed) for name, spec in DATASETS.items() for seed in SEEDS]
    frames: list[pd.DataFrame] = []
    for name, spec, seed in tqdm(runs, desc="loss generality"):
        out_dir = RESULTS_DIR / name / f"seed_{seed}"
        frame = ablation_matrix(_run_config(spec, seed), AblationAxis.LOSS, out_dir)
        frames.append(frame.assign(dataset=name, seed=seed))
        logger.info(
            f"运行完成 | dataset={name} | seed={seed} | "
            f"knn_top1={frame['knn_top1'].round(4).tolist()}"
        )

    summary = _aggregate(pd.concat(frames, ignore_index=True))
    checks = _directional_checks(summary)
    data = {
        "seeds": list(SEEDS),
        "datasets": DATASETS,
        "base_config": BASE_CONFIG,
        "by_dataset": summary,
        "checks": checks,
    }
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)

    logger.info("=" * 50)
    for key, passed in checks.items():
        logger.info(f"{key:<40} {'通过' if passed else '未通过'}")
    logger.info(f"结果已写入: {output_path}")
    return data


if __name__ == "__main__":
    run_eval()
