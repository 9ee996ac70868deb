"""
模块名称：main
功能描述：命令行入口 `colvne`。

子命令:
    gen-data    生成合成长尾数据集并导出为 PPM 目录（train/ 与 val/）
    train       按 JSON 配置训练，写出 metrics.csv 与检查点
    eval        对检查点做 KNN / 线性探针 / 诊断评测，写出 report.csv
    diagnose    只做塌缩诊断，写出 spectrum.csv
    grad-check  完整有限差分梯度校验
    ablate      沿一个轴运行消融矩阵，写出汇总 CSV

每个命令都向 stdout 打印一行 JSON 摘要（status、解析后的完整配置、seed、结果），
日志只写 stderr 与日志文件。退出码：0 成功，1 配置错误，2 读写错误，3 数值错误，
4 梯度校验失败。
"""

import argparse
import json
import math
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

from pydantic import ValidationError

from colvne.config import config
from colvne.errors import ColvneError, ConfigError
from colvne.utils import get_channel_logger, set_console_level

from .commands import (
    CommandOutcome,
    cmd_ablate,
    cmd_diagnose,
    cmd_eval,
    cmd_gen_data,
    cmd_grad_check,
    cmd_train,
)
from .config import describe_validation_error

# ================= 日志 =================
LOG_FILE_DIR: Path = config.LOG_DIR / "cli"
logger = get_channel_logger(LOG_FILE_DIR, "main")

Handler = Callable[[argparse.Namespace], CommandOutcome]

HANDLERS: dict[str, Handler] = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "diagnose": cmd_diagnose,
    "grad-check": cmd_grad_check,
    "ablate": cmd_ablate,
}


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed 必须在 [0, 2^64) 内: {value}")
    return seed


class CommandParser(argparse.ArgumentParser):
    """参数错误与配置错误同为退出码 1。"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(
        prog="colvne", description="VNE + COL 自监督表征学习：数据生成、训练、评测与校验"
    )
    parser.add_argument("--threads", type=int, default=None, help="增强线程数（覆盖 COLVNE_THREADS）")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="控制台日志级别（覆盖 COLVNE_LOG_LEVEL）",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", help="生成合成长尾数据集")
    gen.add_argument("--out", required=True, help="输出目录")
    gen.add_argument("--classes", type=int, default=6, help="类别数 C")
    gen.add_argument("--nmax", type=int, default=400, help="头部类别样本数")
    gen.add_argument("--rho", type=float, default=10.0, help="不平衡比")
    gen.add_argument("--seed", type=_seed, default=0)

    train = sub.add_parser("train", help="训练")
    train.add_argument("--config", required=True, help="JSON 运行配置")
    train.add_argument("--out", default=None, help="输出目录，默认 RUNS_DIR/<配置名>")
    train.add_argument("--seed", type=_seed, default=None, help="覆盖配置中的 seed")
    train.add_argument("--resume", default=None, help="从该检查点继续训练")

    for name, help_text in (("eval", "完整评测"), ("diagnose", "塌缩诊断")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--checkpoint", required=True, help="检查点路径")
        cmd.add_argument("--data", required=True, help="数据根目录")
        cmd.add_argument("--out", required=True, help="输出目录")
        if name == "eval":
            cmd.add_argument("--config", default=None, help="取其中的 eval 段作为评测参数")

    check = sub.add_parser("grad-check", help="有限差分梯度校验")
    check.add_argument("--seed", type=_seed, default=0)
    check.add_argument("--points", type=int, default=20, help="每个损失的随机点数")

    ablate = sub.add_parser("ablate", help="消融矩阵")
    ablate.add_argument("--config", required=True, help="基准 JSON 运行配置")
    ablate.add_argument("--axis", required=True, choices=["loss", "batch", "temp", "mlp"])
    ablate.add_argument("--out", default=None, help="输出目录，默认 RUNS_DIR/<配置名>_ablation_<axis>")
    ablate.add_argument("--seed", type=_seed, default=None, help="覆盖配置中的 seed")
    return parser


def _jsonable(value: Any) -> Any:
    """NaN/Inf 写成 null，保证摘要是严格 JSON。"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    return value


def emit_summary(summary: dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(_jsonable(summary), ensure_ascii=False, sort_keys=True) + "\n")
    sys.stdout.flush()


def _failure(summary: dict[str, Any], command: str, e: ColvneError) -> int:
    logger.error(f"命令失败 | command={command} | exit={e.exit_code} | {e}")
    summary.update(status="error", error=str(e), exit_code=e.exit_code)
    emit_summary(summary)
    return e.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        os.environ["COLVNE_THREADS"] = str(max(1, args.threads))
    if args.log_level is not None:
        set_console_level(args.log_level)

    summary: dict[str, Any] = {"command": args.command}
    try:
        outcome = HANDLERS[args.command](args)
    except ColvneError as e:
        return _failure(summary, args.command, e)
    except ValidationError as e:
        error = ConfigError(f"参数不合法 | {describe_validation_error(e)}")
        return _failure(summary, args.command, error)

    summary.update(
        status="ok",
        exit_code=0,
        config=outcome.config,
        seed=outcome.seed,
        result=outcome.result,
    )
    emit_summary(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
