"""
模块名称：utils
功能描述：项目需要的轮子模块，如日志、可复现随机数流等
"""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .log import get_channel_logger, set_console_level
    from .rng import Stream, keyed_generator


__all__ = ["Stream", "get_channel_logger", "keyed_generator", "set_console_level"]


def __getattr__(name: str) -> Any:
    if name in ("get_channel_logger", "set_console_level"):
        from . import log

        return getattr(log, name)
    if name in ("Stream", "keyed_generator"):
        from . import rng

        return getattr(rng, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
