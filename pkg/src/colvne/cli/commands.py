"""
模块名称：commands
功能描述：各子命令的实现。每个命令返回 CommandOutcome（解析后的完整配置、seed、结果摘要），
         由 main 统一打印为一行 JSON；失败时抛出 ColvneError，退出码取自异常。
"""

import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from colvne.config import config
from colvne.data import LongTailSpec, export_splits, generate_longtail, load_splits
from colvne.errors import ConfigError, DataIOError
from colvne.evaluation import (
    EvalConfig,
    build_bank,
    diagnose,
    evaluate_state,
    write_report_csv,
    write_spectrum_csv,
)
from colvne.model import EmbeddingSpace, checkpoint_load, heads_forward
from colvne.train import train_run
from colvne.utils import get_channel_logger

from .ablation import AblationAxis, ablation_matrix
from .config import RunConfig
from .gradcheck_suite import verify_gradients

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "cli"
logger = get_channel_logger(LOG_FILE_DIR, "commands")

CONFIG_SNAPSHOT: str = "config.json"
REPORT_FILE: str = "report.csv"
SPECTRUM_FILE: str = "spectrum.csv"


@dataclass
class CommandOutcome:
    config: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    result: dict[str, Any] = field(default_factory=dict)


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_json_file(Path(args.config))
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _run_dir(args: argparse.Namespace, suffix: str = "") -> Path:
    """未给 --out 时落在 RUNS_DIR/<配置文件名><后缀>。"""
    if args.out:
        return Path(args.out)
    return config.RUNS_DIR / f"{Path(args.config).stem}{suffix}"


def _write_snapshot(cfg: RunConfig, out_dir: Path) -> None:
    path = out_dir / CONFIG_SNAPSHOT
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(cfg.resolved(), indent=2, ensure_ascii=False), "utf-8")
    except OSError as e:
        raise DataIOError(f"无法写出配置快照 {path}: {e}") from e


# ────────────────────────────────────────────────────────────
# 子命令
# ────────────────────────────────────────────────────────────


def cmd_gen_data(args: argparse.Namespace) -> CommandOutcome:
    try:
        spec = LongTailSpec(num_classes=args.classes, n_max=args.nmax, rho=args.rho)
    except ValueError as e:
        raise ConfigError(f"合成数据参数不合法: {e}") from e
    splits = generate_longtail(spec, args.seed)
    export_splits(splits, Path(args.out))
    return CommandOutcome(
        config=spec.model_dump(mode="json"),
        seed=args.seed,
        result={
            "out": str(args.out),
            "train": len(splits.train),
            "val": len(splits.val),
            "class_counts": (splits.train.class_counts() + splits.val.class_counts()).tolist(),
        },
    )


def cmd_train(args: argparse.Namespace) -> CommandOutcome:
    cfg = _load_run_config(args)
    out_dir = _run_dir(args)
    _write_snapshot(cfg, out_dir)
    resume = Path(args.resume) if args.resume else None
    state, records = train_run(cfg, out_dir=out_dir, resume_from=resume)
    result: dict[str, Any] = {"out": str(out_dir), "epochs": state.epoch}
    if records:
        last = records[-1]
        result.update(
            total_loss=last.total_loss,
            vne=last.vne,
            effective_rank=last.effective_rank,
            class_usage_entropy=last.class_usage_entropy,
            knn_top1=last.knn_top1,
        )
    return CommandOutcome(config=cfg.resolved(), seed=cfg.seed, result=result)


def _eval_config(args: argparse.Namespace) -> EvalConfig:
    if not getattr(args, "config", None):
        return EvalConfig()
    return RunConfig.from_json_file(Path(args.config)).eval


def cmd_eval(args: argparse.Namespace) -> CommandOutcome:
    state = checkpoint_load(Path(args.checkpoint))
    splits = load_splits(Path(args.data))
    eval_cfg = _eval_config(args)
    report = evaluate_state(state, splits, eval_cfg)
    path = write_report_csv(report, Path(args.out) / REPORT_FILE)
    return CommandOutcome(
        config={
            "eval": eval_cfg.model_dump(mode="json"),
            "arch": state.arch.model_dump(mode="json"),
        },
        seed=state.seed,
        result={"report": str(path), **report.summary()},
    )


def cmd_diagnose(args: argparse.Namespace) -> CommandOutcome:
    state = checkpoint_load(Path(args.checkpoint))
    splits = load_splits(Path(args.data))
    bank = build_bank(state, splits, EmbeddingSpace.PROJECTION, val=True)
    head_logits = heads_forward(state, bank.embeddings)[state.arch.primary_head]
    report = diagnose(bank, head_logits)
    path = write_spectrum_csv(report, Path(args.out) / SPECTRUM_FILE)
    return CommandOutcome(
        config={"arch": state.arch.model_dump(mode="json")},
        seed=state.seed,
        result={
            "spectrum": str(path),
            "vne": report.vne,
            "effective_rank": report.effective_rank,
            "class_usage_entropy": report.class_usage_entropy,
            "majority_fraction": report.majority_fraction,
        },
    )


def cmd_grad_check(args: argparse.Namespace) -> CommandOutcome:
    result = verify_gradients(seed=args.seed, points=args.points)
    return CommandOutcome(
        config={"points": args.points, "tolerance": result.tolerance},
        seed=args.seed,
        result={"max_rel_err": result.errors},
    )


def cmd_ablate(args: argparse.Namespace) -> CommandOutcome:
    cfg = _load_run_config(args)
    out_dir = _run_dir(args, f"_ablation_{args.axis}")
    _write_snapshot(cfg, out_dir)
    axis = AblationAxis(args.axis)
    frame = ablation_matrix(cfg, axis, out_dir)
    notes = [n for n in frame["note"].fillna("").tolist() if n]
    return CommandOutcome(
        config=cfg.resolved(),
        seed=cfg.seed,
        result={
            "csv": str(out_dir / f"ablation_{axis}.csv"),
            "cells": frame["cell"].tolist(),
            "knn_top1": frame["knn_top1"].tolist(),
            "notes": notes,
        },
    )
