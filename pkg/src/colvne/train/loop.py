"""
模块名称：loop
功能描述：自监督训练主循环。

每个批次:
    1. 多裁剪增强（按 (seed, epoch, index) 键控，可多线程）
    2. 所有视图按视图优先顺序堆叠，经编码器、投影头（训练模式 BN）
    3. 所有视图投影拼接后计算 VNE 惩罚 −α·S
    4. 每个分类头、每个有序视图对 (全局视图 i 作目标, 视图 j 作预测, i≠j) 计算 COL，
       先对视图对取平均，再对分类头取平均
    5. 反向传播，按 lr_at 调度执行 sgd_step
每个 epoch 追加一条 MetricsRecord 并写检查点；(配置, seed) 完全决定结果。
"""

import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from tqdm import tqdm

from colvne.augment import augment_batch
from colvne.config import config
from colvne.data import DatasetSplits, batch_iter, generate_longtail, load_splits
from colvne.diffgraph import Graph, Node, ops
from colvne.errors import ConfigError, NumericalError
from colvne.evaluation.diagnostics import usage_entropy
from colvne.evaluation.knn import knn_eval
from colvne.evaluation.report import build_bank
from colvne.linalg import eigh_symmetric
from colvne.losses import CrossViewTargets, autocorrelation, pair_loss_node, spectral_entropy
from colvne.losses.objective import vne_penalty_node
from colvne.model import (
    ArchitectureConfig,
    EmbeddingSpace,
    ModelState,
    bind_params,
    checkpoint_load,
    checkpoint_save,
    forward_graph,
    init_model,
    to_encoder_input,
)
from colvne.utils import get_channel_logger

from .config import TrainConfig
from .models import MetricsRecord, read_metrics, write_metrics
from .optim import lr_at, sgd_step

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "train"
logger = get_channel_logger(LOG_FILE_DIR, "loop")

METRICS_FILE: str = "metrics.csv"
CHECKPOINT_DIR: str = "checkpoints"
LAST_CHECKPOINT: str = "last.cvne"


# ────────────────────────────────────────────────────────────
# 准备
# ────────────────────────────────────────────────────────────


def load_data(cfg: TrainConfig) -> DatasetSplits:
    if cfg.data_dir is not None:
        return load_splits(cfg.data_dir)
    if cfg.longtail is None:
        raise ConfigError("未配置数据来源：longtail 与 data_dir 均为空")
    return generate_longtail(cfg.longtail, cfg.seed)


def resolve_arch(cfg: TrainConfig, splits: DatasetSplits) -> ArchitectureConfig:
    """目录数据未显式给出类别数时，以数据集的类别数为准。"""
    if "num_classes" in cfg.arch.model_fields_set or cfg.arch.num_classes == splits.num_classes:
        return cfg.arch
    return cfg.arch.model_copy(update={"num_classes": splits.num_classes})


def checkpoint_path(out_dir: Path, epoch: int) -> Path:
    return out_dir / CHECKPOINT_DIR / f"epoch_{epoch:04d}.cvne"


# ────────────────────────────────────────────────────────────
# 单批次
# ────────────────────────────────────────────────────────────


@dataclass(slots=True)
class BatchOutcome:
    total: float
    col: float
    vne: float
    predictions: np.ndarray


def multi_view_loss(logits: list[Node], batch: int, views: int, cfg: TrainConfig) -> Node:
    """全部分类头、全部 (全局目标, 预测) 视图对的 COL 平均值。"""
    head_terms: list[Node] = []
    for head_logits in logits:
        slices = [ops.slice_rows(head_logits, v * batch, (v + 1) * batch) for v in range(views)]
        pair_terms: list[Node] = []
        for i in range(2):
            for j in range(views):
                if i == j:
                    continue
                pred, target = slices[j], slices[i]
                targets = CrossViewTargets.from_logits(
                    pred.value, target.value, cfg.loss.tau_row, cfg.loss.tau_col
                )
                pair_terms.append(pair_loss_node(pred, target, targets, cfg.loss))
        head_terms.append(_mean_nodes(pair_terms))
    return _mean_nodes(head_terms)


def _mean_nodes(nodes: list[Node]) -> Node:
    total = nodes[0]
    for node in nodes[1:]:
        total = ops.add(total, node)
    return ops.scale(total, 1.0 / len(nodes))


def train_step(
    state: ModelState,
    splits: DatasetSplits,
    indices: np.ndarray,
    epoch: int,
    lr: float,
    cfg: TrainConfig,
) -> BatchOutcome:
    crops = augment_batch(splits.train.images, indices, cfg.augment, cfg.seed, epoch)
    views = cfg.augment.views_per_sample
    batch = len(indices)
    stacked = [crops[s].views[v] for v in range(views) for s in range(batch)]
    x = to_encoder_input(stacked, state.arch.input_size)

    g = Graph()
    params = bind_params(g, state)
    out = forward_graph(params, state, g.constant(x), training=True)
    first = multi_view_loss(out.logits, batch, views, cfg)
    penalty = vne_penalty_node(out.projections, cfg.loss)
    total = first if penalty is None else ops.add(first, penalty)

    if penalty is not None:
        eigenvalues = g.nodes[penalty.inputs[0]].meta["eigenvalues"]
    else:
        z_auto = autocorrelation(out.projections.value, validate=False)
        eigenvalues = eigh_symmetric(z_auto).eigenvalues
    entropy = spectral_entropy(eigenvalues)

    total_value = total.item()
    if not math.isfinite(total_value):
        raise NumericalError(f"损失出现非有限值: {total_value} (epoch={epoch})")
    grads = g.backward(total)
    sgd_step(state.params, grads, state.buffers, lr, cfg)
    state.global_step += 1

    primary = out.logits[state.arch.primary_head].value[:batch]
    return BatchOutcome(total_value, first.item(), entropy, np.argmax(primary, axis=1))


# ────────────────────────────────────────────────────────────
# 主循环
# ────────────────────────────────────────────────────────────


def online_knn(state: ModelState, splits: DatasetSplits, cfg: TrainConfig) -> float:
    train_bank = build_bank(state, splits, EmbeddingSpace.PROJECTION, val=False)
    val_bank = build_bank(state, splits, EmbeddingSpace.PROJECTION, val=True)
    top1, _ = knn_eval(train_bank, val_bank, min(cfg.eval.knn_k, len(train_bank)))
    return top1


def train_run(
    cfg: TrainConfig,
    out_dir: Path | None = None,
    resume_from: Path | None = None,
    splits: DatasetSplits | None = None,
) -> tuple[ModelState, list[MetricsRecord]]:
    """
    完整训练。

    Args:
        cfg: 训练配置
        out_dir: 输出目录（metrics.csv 与 checkpoints/）；None 时不落盘
        resume_from: 从该检查点继续训练，结果与不中断训练一致
        splits: 预先加载的数据集，缺省按配置生成或读取

    Returns:
        tuple[ModelState, list[MetricsRecord]]: 最终状态与全部 epoch 的指标

    Raises:
        ConfigError: 批大小超过训练集大小
        NumericalError: 损失或梯度出现非有限值（已写出的检查点保留）
    """
    splits = splits or load_data(cfg)
    splits.train.check_trainable()
    if cfg.batch_size > len(splits.train):
        raise ConfigError(f"batch_size={cfg.batch_size} 超过训练集大小 {len(splits.train)}")
    arch = resolve_arch(cfg, splits)

    records: list[MetricsRecord] = []
    if resume_from is not None:
        state = checkpoint_load(resume_from)
        if state.arch.model_dump() != arch.model_dump() or state.seed != cfg.seed:
            raise ConfigError("检查点的网络结构或 seed 与当前配置不一致，无法续训")
        metrics_file = out_dir / METRICS_FILE if out_dir is not None else None
        if metrics_file is not None and metrics_file.is_file():
            records = [r for r in read_metrics(metrics_file) if r.epoch < state.epoch]
    else:
        state = init_model(arch, cfg.seed)

    steps_per_epoch = len(splits.train) // cfg.batch_size
    logger.info(
        f"开始训练 | epochs={cfg.epochs} | start_epoch={state.epoch} | "
        f"train={len(splits.train)} | batch={cfg.batch_size} | steps/epoch={steps_per_epoch} | "
        f"col={cfg.loss.enable_col} | "
        f"vne={cfg.loss.enable_vne} | seed={cfg.seed}"
    )
    if out_dir is not None:
        write_metrics(records, out_dir / METRICS_FILE)

    for epoch in range(state.epoch, cfg.epochs):
        started = time.perf_counter()
        batches = batch_iter(splits.train, cfg.batch_size, epoch, cfg.seed)
        totals, cols, entropies = [], [], []
        usage = np.zeros(state.arch.head_sizes[state.arch.primary_head], dtype=np.int64)
        lr = cfg.start_lr
        progress = tqdm(
            batches, desc=f"epoch {epoch}", leave=False, disable=not sys.stderr.isatty()
        )
        for indices in progress:
            lr = lr_at(state.global_step, steps_per_epoch, cfg)
            try:
                outcome = train_step(state, splits, indices, epoch, lr, cfg)
            except NumericalError as e:
                logger.error(f"训练中止 | epoch={epoch} | step={state.global_step} | {e}")
                raise
            totals.append(outcome.total)
            cols.append(outcome.col)
            entropies.append(outcome.vne)
            usage += np.bincount(outcome.predictions, minlength=usage.size)

        state.epoch = epoch + 1
        knn_top1 = online_knn(state, splits, cfg) if cfg.eval.online_knn else math.nan
        record = MetricsRecord(
            epoch=epoch,
            total_loss=float(np.mean(totals)),
            col_loss=float(np.mean(cols)),
            vne=float(np.mean(entropies)),
            effective_rank=float(np.mean(np.exp(entropies))),
            class_usage_entropy=usage_entropy(usage),
            lr=lr,
            seconds=time.perf_counter() - started,
            knn_top1=knn_top1,
        )
        records.append(record)
        logger.info(
            f"epoch 完成 | epoch={epoch} | loss={record.total_loss:.5f} | "
            f"col={record.col_loss:.5f} | vne={record.vne:.4f} | "
            f"eff_rank={record.effective_rank:.2f} | "
            f"usage_H={record.class_usage_entropy:.3f} | knn={knn_top1:.4f} | lr={lr:.5f}"
        )

        if out_dir is not None:
            write_metrics(records, out_dir / METRICS_FILE)
            if state.epoch % cfg.checkpoint_every == 0 or state.epoch == cfg.epochs:
                checkpoint_save(state, checkpoint_path(out_dir, state.epoch))
                checkpoint_save(state, out_dir / CHECKPOINT_DIR / LAST_CHECKPOINT)

    return state, records
