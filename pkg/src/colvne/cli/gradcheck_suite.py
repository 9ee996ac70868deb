"""
模块名称：gradcheck_suite
功能描述：grad-check 子命令使用的完整有限差分校验集。

覆盖：
    - 损失：naive_ssl_ce、uniform_prior_loss、对称版本、optimized_incorrect_entropy、
      col_loss、含 VNE 自定义反向的 total_objective，每个各 20 个随机点
    - 原语：matmul、div、row_softmax、l2_normalize_rows、batch_norm、conv2d、max_pool2d 等

交叉视图目标在基准点上算一次后固定，与训练时的 stop-gradient 语义一致。
相对误差 |解析 − 数值| / max(1, |数值|) 不超过 1e-4 视为通过。
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from colvne.config import config
from colvne.diffgraph import Graph, GraphBuilder, Node, RunningStats, grad_check, ops
from colvne.errors import GradCheckError
from colvne.linalg import Tensor
from colvne.losses import (
    CrossViewTargets,
    LossConfig,
    col_loss_node,
    naive_ssl_ce_node,
    optimized_incorrect_entropy_node,
    symmetric_uniform_prior_node,
    total_objective_node,
    uniform_prior_node,
)
from colvne.utils import Stream, get_channel_logger, keyed_generator

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "cli"
logger = get_channel_logger(LOG_FILE_DIR, "gradcheck")

TOLERANCE: float = 1e-4
STEP: float = 1e-5
POINTS_PER_LOSS: int = 20
# logits 量级：τ_row=0.1 下仍保持 softmax 不饱和
LOGIT_SCALE: float = 0.1

# 随机点 -> (图构建函数, 参数点)
CaseFactory = Callable[[np.random.Generator], tuple[GraphBuilder, dict[str, Tensor]]]


@dataclass
class GradCheckResult:
    """每个校验项的最大相对误差。"""

    errors: dict[str, float] = field(default_factory=dict)
    tolerance: float = TOLERANCE

    @property
    def failures(self) -> dict[str, float]:
        return {k: v for k, v in self.errors.items() if not v <= self.tolerance}

    @property
    def passed(self) -> bool:
        return not self.failures


# ────────────────────────────────────────────────────────────
# 损失
# ────────────────────────────────────────────────────────────


def _logits(rng: np.random.Generator) -> dict[str, Tensor]:
    n = int(rng.integers(3, 9))
    c = int(rng.integers(2, 5))
    return {
        "s1": LOGIT_SCALE * rng.standard_normal((n, c)),
        "s2": LOGIT_SCALE * rng.standard_normal((n, c)),
    }


def _targets(point: dict[str, Tensor], cfg: LossConfig) -> CrossViewTargets:
    return CrossViewTargets.from_logits(point["s1"], point["s2"], cfg.tau_row, cfg.tau_col)


def _naive_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    cfg = LossConfig()
    point = _logits(rng)
    targets = _targets(point, cfg)

    def build(g: Graph, p: dict[str, Node]) -> Node:
        return naive_ssl_ce_node(p["s1"], targets.p2, cfg.tau_row)

    return build, {"s1": point["s1"]}


def _uniform_prior_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    cfg = LossConfig()
    point = _logits(rng)
    targets = _targets(point, cfg)

    def build(g: Graph, p: dict[str, Node]) -> Node:
        return uniform_prior_node(p["s1"], targets.w12, cfg.tau_row)

    return build, {"s1": point["s1"]}


def _symmetric_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    cfg = LossConfig()
    point = _logits(rng)
    targets = _targets(point, cfg)

    def build(g: Graph, p: dict[str, Node]) -> Node:
        return symmetric_uniform_prior_node(p["s1"], p["s2"], targets, cfg.tau_row)

    return build, point


def _incorrect_entropy_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    n = int(rng.integers(3, 9))
    k = int(rng.integers(3, 6))
    s = rng.standard_normal((n, k))
    correct = rng.integers(0, k, size=n)

    def build(g: Graph, p: dict[str, Node]) -> Node:
        return optimized_incorrect_entropy_node(ops.row_softmax(p["s"], 1.0), correct)

    return build, {"s": s}


def _col_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    cfg = LossConfig()
    point = _logits(rng)
    targets = _targets(point, cfg)

    def build(g: Graph, p: dict[str, Node]) -> Node:
        return col_loss_node(p["s1"], p["s2"], targets, cfg)

    return build, point


def _total_case(rng: np.random.Generator) -> tuple[GraphBuilder, dict[str, Tensor]]:
    cfg = LossConfig()
    point = _logits(rng)
    targets = _targets(point, cfg)
    # M > d，自相关矩阵满秩，VNE 梯度在各特征值处良定
    d = int(rng.integers(2, 5))
    point["h"] = rng.standard_normal((2 * point["s1"].shape[0], d))

    def build(g: Graph, p: dict[str, Node]) -> Node:
        h_all = ops.l2_normalize_rows(p["h"])
        return total_objective_node(p["s1"], p["s2"], h_all, targets, cfg)

    return build, point


LOSS_CASES: dict[str, CaseFactory] = {
    "naive_ssl_ce": _naive_case,
    "uniform_prior_loss": _uniform_prior_case,
    "symmetric_uniform_prior_loss": _symmetric_case,
    "optimized_incorrect_entropy": _incorrect_entropy_case,
    "col_loss": _col_case,
    "total_objective": _total_case,
}


# ────────────────────────────────────────────────────────────
# 原语
# ────────────────────────────────────────────────────────────


def _weighted_sum(node: Node, rng: np.random.Generator) -> Node:
    """用固定随机权重把任意形状的输出压成标量，保证每个分量都参与校验。"""
    w = node.graph.constant(rng.standard_normal(node.shape))
    return ops.sum(ops.mul(node, w))


def _primitive_cases(rng: np.random.Generator) -> dict[str, tuple[GraphBuilder, dict[str, Tensor]]]:
    w_seed = int(rng.integers(0, 2**32))

    # 每次重建图都取同一组权重
    def reduce(node: Node) -> Node:
        return _weighted_sum(node, keyed_generator(w_seed, int(Stream.CHECK), node.value.size))

    positive = rng.uniform(0.5, 2.0, size=(3, 4))
    cases: dict[str, tuple[GraphBuilder, dict[str, Tensor]]] = {
        "matmul": (
            lambda g, p: reduce(ops.matmul(p["a"], p["b"])),
            {"a": rng.standard_normal((3, 4)), "b": rng.standard_normal((4, 2))},
        ),
        "div": (
            lambda g, p: reduce(ops.div(p["a"], p["b"])),
            {"a": rng.standard_normal((3, 4)), "b": positive},
        ),
        "log_exp": (
            lambda g, p: reduce(ops.add(ops.log(p["a"]), ops.exp(p["a"]))),
            {"a": positive.copy()},
        ),
        "leaky_relu": (
            lambda g, p: reduce(ops.leaky_relu(p["a"], 0.1)),
            {"a": rng.choice([-1.0, 1.0], size=(3, 4)) * rng.uniform(0.1, 1.0, size=(3, 4))},
        ),
        "row_softmax": (
            lambda g, p: reduce(ops.row_softmax(p["a"], 0.5)),
            {"a": rng.standard_normal((3, 4))},
        ),
        "l2_normalize_rows": (
            lambda g, p: reduce(ops.l2_normalize_rows(p["a"])),
            {"a": rng.standard_normal((4, 3))},
        ),
        "mean_transpose": (
            lambda g, p: reduce(ops.mean(ops.transpose(p["a"]), axis=1, keepdims=True)),
            {"a": rng.standard_normal((4, 3))},
        ),
        "batch_norm": (
            lambda g, p: reduce(
                ops.batch_norm(
                    p["x"], p["gamma"], p["beta"], RunningStats.fresh(3), training=True
                )
            ),
            {
                "x": rng.standard_normal((5, 3)),
                "gamma": rng.uniform(0.5, 1.5, size=3),
                "beta": rng.standard_normal(3),
            },
        ),
        "conv2d": (
            lambda g, p: reduce(ops.conv2d(p["x"], p["w"], p["b"], stride=1, padding=1)),
            {
                "x": rng.standard_normal((2, 2, 4, 4)),
                "w": rng.standard_normal((3, 2, 3, 3)),
                "b": rng.standard_normal(3),
            },
        ),
        "max_pool2d": (
            lambda g, p: reduce(ops.max_pool2d(p["x"], 2)),
            # 各元素互不相同，差分步长内不会改变最大值位置
            {"x": rng.permutation(32).reshape(1, 2, 4, 4) * 0.1},
        ),
    }
    return cases


# ────────────────────────────────────────────────────────────
# 入口
# ────────────────────────────────────────────────────────────


def run_grad_suite(
    seed: int = 0, points: int = POINTS_PER_LOSS, tolerance: float = TOLERANCE
) -> GradCheckResult:
    """执行完整校验集，返回各项最大相对误差（不抛异常）。"""
    result = GradCheckResult(tolerance=tolerance)
    for name, factory in LOSS_CASES.items():
        worst = 0.0
        for i in range(points):
            build, point = factory(keyed_generator(seed, int(Stream.CHECK), i))
            worst = max(worst, grad_check(build, point, STEP))
        result.errors[name] = worst
        logger.info(f"梯度校验 | case={name} | points={points} | max_rel_err={worst:.3e}")

    for name, (build, point) in _primitive_cases(keyed_generator(seed, int(Stream.CHECK))).items():
        err = grad_check(build, point, STEP)
        result.errors[f"op.{name}"] = err
        logger.info(f"梯度校验 | case=op.{name} | max_rel_err={err:.3e}")
    return result


def verify_gradients(seed: int = 0, points: int = POINTS_PER_LOSS) -> GradCheckResult:
    """
    执行校验集，有任何一项超出容差即抛出 GradCheckError。

    Raises:
        GradCheckError: failures 中给出超差项及其误差
    """
    result = run_grad_suite(seed, points)
    if not result.passed:
        logger.error(f"梯度校验未通过 | failures={result.failures}")
        raise GradCheckError(
            f"{len(result.failures)} 项梯度校验超出容差 {result.tolerance:g}", result.failures
        )
    return result
