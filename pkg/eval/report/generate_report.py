"""
模块名称：generate_report
功能描述：读取损失一致性实验的 JSON 结果与各消融轴的 CSV，汇总为 Markdown 报告。

依赖：
    eval_loss_generality.py     → data/eval/results/loss_generality_result.json
    eval_desk_reproduction.py   → data/eval/results/desk_reproduction_result.json
    colvne ablate --out <dir>   → <dir>/ablation_<axis>.csv（默认在 data/eval/results/ablation 下查找）

输出：data/eval/results/report.md
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Any

import pandas as pd

from colvne.cli.ablation import ABLATION_COLUMNS
from colvne.config import config
from colvne.utils import get_channel_logger

# ================= 日志 =================
logger = get_channel_logger(config.LOG_DIR / "eval", "generate_report")

# ================= 路径配置 =================
RESULTS_DIR = config.DATA_DIR / "eval" / "results"
GENERALITY_PATH = RESULTS_DIR / "loss_generality_result.json"
DESK_PATH = RESULTS_DIR / "desk_reproduction_result.json"
ABLATION_DIR = RESULTS_DIR / "ablation"
OUTPUT_PATH = RESULTS_DIR / "report.md"

AXIS_TITLES: dict[str, str] = {
    "loss": "损失项",
    "batch": "批大小",
    "temp": "softmax 温度",
    "mlp": "投影头结构",
}


# ────────────────────────────────────────────────────────────
# 数据加载
# ────────────────────────────────────────────────────────────


def _load_json(path: Path) -> dict[str, Any]:
    if not path.exists():
        logger.warning(f"结果文件不存在，跳过: {path}")
        return {}
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _load_ablations(directory: Path) -> dict[str, pd.DataFrame]:
    tables: dict[str, pd.DataFrame] = {}
    for axis in AXIS_TITLES:
        path = directory / f"ablation_{axis}.csv"
        if path.is_file():
            tables[axis] = pd.read_csv(path)
        else:
            logger.warning(f"消融结果不存在，跳过: {path}")
    return tables


# ────────────────────────────────────────────────────────────
# 报告各节
# ────────────────────────────────────────────────────────────


def _pct(value: object) -> str:
    if isinstance(value, int | float):
        return f"{value * 100:.2f}%"
    return str(value)


def _render_header() -> str:
    now = datetime.now().strftime("%Y-%m-%d %H:%M")
    return f"""# colvne 评估报告

> 生成时间：{now}
> 项目：colvne，长尾数据上的自监督分类表征（VNE 正则 + 类别优化损失）

---
"""


def _render_generality(result: dict[str, Any]) -> str:
    if not result:
        return "## 损失项一致性\n\n> 结果文件缺失，请先运行 eval_loss_generality.py\n\n"

    lines = [
        "## 损失项一致性",
        "",
        f"- seeds：{result.get('seeds', [])}",
        "",
        "| 数据集 | 单元 | KNN top-1 | 线性探针 top-1 | 有效秩 | 类别使用熵 |",
        "|---|---|---|---|---|---|",
    ]
    for dataset, cells in result.get("by_dataset", {}).items():
        for cell, stats in cells.items():
            lines.append(
                f"| {dataset} | {cell} | "
                f"{_pct(stats['knn_top1_mean'])} ± {_pct(stats['knn_top1_std'])} | "
                f"{_pct(stats['probe_top1_mean'])} ± {_pct(stats['probe_top1_std'])} | "
                f"{stats['effective_rank_mean']:.2f} | {stats['class_usage_entropy_mean']:.3f} |"
            )
    checks = result.get("checks", {})
    if checks:
        lines += ["", "### 方向性检查", ""]
        lines += [f"- {'✅' if ok else '❌'} `{key}`" for key, ok in checks.items()]
    return "\n".join(lines) + "\n\n"


def _render_desk(result: dict[str, Any]) -> str:
    if not result:
        return "## 桌面配置复现\n\n> 结果文件缺失，请先运行 eval_desk_reproduction.py\n\n"

    lines = [
        "## 桌面配置复现",
        "",
        f"- C={result['num_classes']}，d={result['embed_dim']}",
        "",
        "| 单元 | KNN top-1 | 有效秩 | 类别使用熵 | 多数类占比 |",
        "|---|---|---|---|---|",
    ]
    for cell in result.get("cells", []):
        lines.append(
            f"| {cell['cell']} | {_pct(cell['knn_top1'])} | {cell['effective_rank']:.2f} | "
            f"{cell['class_usage_entropy']:.3f} | {_pct(cell['majority_fraction'])} |"
        )
    lines += ["", "### 方向性检查", ""]
    lines += [f"- {'✅' if ok else '❌'} `{key}`" for key, ok in result["checks"].items()]
    return "\n".join(lines) + "\n\n"


def _render_ablation(axis: str, frame: pd.DataFrame) -> str:
    lines = [
        f"## 消融：{AXIS_TITLES[axis]}",
        "",
        "| 单元 | KNN top-1 | 线性探针 top-1 | 聚类准确率 | 有效秩 | 多数类占比 |",
        "|---|---|---|---|---|---|",
    ]
    for row in frame.itertuples(index=False):
        lines.append(
            f"| {row.cell} | {_pct(row.knn_top1)} | {_pct(row.probe_top1)} | "
            f"{_pct(row.cluster_accuracy)} | {row.effective_rank:.2f} | "
            f"{_pct(row.majority_fraction)} |"
        )
    notes = [str(n) for n in frame["note"].dropna() if str(n)]
    if notes:
        lines += ["", *[f"> {n}" for n in notes]]
    return "\n".join(lines) + "\n\n"


# ────────────────────────────────────────────────────────────
# 主入口
# ────────────────────────────────────────────────────────────


def generate_report(
    output_path: Path = OUTPUT_PATH, ablation_dir: Path = ABLATION_DIR
) -> Path:
    """
    Args:
        output_path: 报告输出路径
        ablation_dir: ablation_<axis>.csv 所在目录

    Returns:
        Path: 报告文件路径
    """
    output_path.parent.mkdir(parents=True, exist_ok=True)
    generality = _load_json(GENERALITY_PATH)
    desk = _load_json(DESK_PATH)
    ablations = _load_ablations(ablation_dir)
    for axis, frame in ablations.items():
        missing = [c for c in ABLATION_COLUMNS if c not in frame.columns]
        if missing:
            logger.warning(f"消融表缺少列，跳过 | axis={axis} | missing={missing}")
    ablations = {
        axis: frame
        for axis, frame in ablations.items()
        if all(c in frame.columns for c in ABLATION_COLUMNS)
    }
    logger.info(f"已加载 | generality={bool(generality)} | ablation_axes={list(ablations)}")

    sections = [_render_header(), _render_generality(generality), _render_desk(desk)]
    sections += [_render_ablation(axis, frame) for axis, frame in ablations.items()]
    report_text = "\n".join(sections)

    with open(output_path, "w", encoding="utf-8") as f:
        f.write(report_text)
    logger.info(f"报告已生成: {output_path} | 字符数={len(report_text)}")
    return output_path


if __name__ == "__main__":
    generate_report()
