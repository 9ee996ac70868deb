"""
模块名称：log
功能描述：基于 Loguru 的按通道日志。每个子系统（linalg / train / cli ...）一个日志目录，
         目录下 runtime.log 记录 INFO 及以上，error.log 记录 ERROR 及带回溯的异常；
         控制台只有一个 stderr sink，stdout 留给 CLI 的单行 JSON 运行摘要。
"""

import sys
from pathlib import Path
from typing import TYPE_CHECKING

from loguru import logger

from colvne.config import config

if TYPE_CHECKING:
    from loguru import Logger, Record

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<yellow>[{extra[channel]}]</yellow> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} | {message}"

# 控制台 sink 的 handler id；None 表示尚未初始化
_console_id: int | None = None
# 已绑定文件 sink 的 (目录, 通道)
_channels: set[tuple[Path, str]] = set()


def set_console_level(level: str) -> None:
    """替换控制台 sink，改用新的级别。文件 sink 不受影响。"""
    global _console_id

    if _console_id is None:
        logger.remove()
        logger.configure(extra={"channel": "GLOBAL"})
    else:
        logger.remove(_console_id)
    _console_id = logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level.upper())


def _bind_files(log_dir: Path, channel: str) -> None:
    def only_channel(record: "Record") -> bool:
        extra = record["extra"]
        return extra.get("channel") == channel and extra.get("log_dir") == str(log_dir)

    log_dir.mkdir(parents=True, exist_ok=True)
    logger.add(
        log_dir / "runtime.log",
        format=FILE_FORMAT,
        level="INFO",
        filter=only_channel,
        rotation="5 MB",
        retention="1 week",
        compression="zip",
        encoding="utf-8",
    )
    logger.add(
        log_dir / "error.log",
        format=FILE_FORMAT,
        level="ERROR",
        filter=only_channel,
        rotation="5 MB",
        retention="1 week",
        encoding="utf-8",
        backtrace=True,
        diagnose=False,
    )


def get_channel_logger(
    log_dir: str | Path = config.LOG_DIR, channel_name: str = "default"
) -> "Logger":
    """
    取一个绑定了 channel 的 logger。

    同一 (log_dir, channel_name) 只绑定一次文件 sink；控制台 sink 在首次调用时按
    COLVNE_LOG_LEVEL 建立。
    """
    if _console_id is None:
        set_console_level(config.log_level)

    key = (Path(log_dir).resolve(), channel_name)
    if key not in _channels:
        _bind_files(key[0], channel_name)
        _channels.add(key)
    return logger.bind(channel=channel_name, log_dir=str(key[0]))
