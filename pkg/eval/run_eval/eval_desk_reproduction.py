"""
模块名称：eval_desk_reproduction
功能描述：桌面配置（configs/desk.json：C=6, n_max=400, ρ=10, 50 epochs）上的 loss 轴消融，
         检查方向性结论：
    - baseline（仅朴素交叉熵）塌缩：majority_fraction ≥ 0.8 或有效秩 ≤ 0.3·d
    - +COL+VNE 的类别使用熵 ≥ 0.8·ln C
    - +COL+VNE 的有效秩 ≥ 0.6·d，KNN top-1 ≥ 80%
    - +COL+VNE 的 KNN top-1 在所有单元中最高

输出：
    data/eval/results/desk_reproduction_result.json
    data/eval/results/desk/ablation_loss.csv

任一检查未通过时以退出码 1 结束。
"""

import json
import sys
from pathlib import Path
from typing import Any

from colvne.cli import AblationAxis, RunConfig, ablation_matrix, loss_axis_checks
from colvne.config import config
from colvne.utils import get_channel_logger

# ================= 日志 =================
logger = get_channel_logger(config.LOG_DIR / "eval", "eval_desk_reproduction")

# ================= 路径配置 =================
CONFIG_PATH = config.ROOT_DIR / "configs" / "desk.json"
RESULTS_DIR = config.DATA_DIR / "eval" / "results"
RUN_DIR = RESULTS_DIR / "desk"
OUTPUT_PATH = RESULTS_DIR / "desk_reproduction_result.json"


def run_eval(config_path: Path = CONFIG_PATH, output_path: Path = OUTPUT_PATH) -> dict[str, Any]:
    base = RunConfig.from_json_file(config_path)
    if base.longtail is None:
        raise ValueError(f"{config_path} 必须使用合成长尾数据（longtail 段）")
    num_classes, embed_dim = base.longtail.num_classes, base.arch.proj_out

    frame = ablation_matrix(base, AblationAxis.LOSS, RUN_DIR)
    checks = loss_axis_checks(frame, num_classes, embed_dim)
    data = {
        "config": base.resolved(),
        "num_classes": num_classes,
        "embed_dim": embed_dim,
        "cells": frame.drop(columns=["axis", "note"]).to_dict(orient="records"),
        "checks": checks,
    }
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)

    logger.info("=" * 50)
    for key, passed in checks.items():
        logger.info(f"{key:<24} {'通过' if passed else '未通过'}")
    logger.info(f"结果已写入: {output_path}")
    return data


if __name__ == "__main__":
    result = run_eval()
    sys.exit(0 if all(result["checks"].values()) else 1)
