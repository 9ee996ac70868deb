"""
模块名称：config
功能描述：命令行运行配置。RunConfig 即 JSON 形式的 TrainConfig（含 loss / arch / augment /
         longtail / eval 子段），未知键一律拒绝；缺省字段按默认值补齐。
"""

import json
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from colvne.errors import ConfigError
from colvne.train.config import TrainConfig


def describe_validation_error(e: ValidationError) -> str:
    """把 pydantic 校验错误压成一行：字段路径: 原因; ..."""
    parts = []
    for err in e.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


class RunConfig(TrainConfig):
    """一次 CLI 运行的完整配置。"""

    @classmethod
    def from_mapping(cls, data: dict[str, Any], source: str = "<mapping>") -> "RunConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"配置 {source} 不合法 | {describe_validation_error(e)}") from e

    @classmethod
    def from_json_file(cls, path: Path) -> "RunConfig":
        """
        读取并校验 JSON 配置。

        Raises:
            ConfigError: 文件不存在、不是合法 JSON、顶层不是对象或字段校验失败
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"配置文件不存在: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConfigError(f"无法解析配置文件 {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"配置文件 {path} 顶层必须是 JSON 对象")
        return cls.from_mapping(data, source=str(path))

    def with_overrides(self, **updates: Any) -> "RunConfig":
        """在当前配置上覆盖若干顶层字段并重新校验（用于 --seed 与消融矩阵）。"""
        data = self.model_dump(mode="json", exclude_unset=True)
        for key, value in updates.items():
            if isinstance(value, dict) and isinstance(data.get(key), dict):
                data[key] = {**data[key], **value}
            else:
                data[key] = value
        return self.from_mapping(data, source="overrides")

    def resolved(self) -> dict[str, Any]:
        """已补齐默认值的完整配置，可直接写回 JSON 复现本次运行。"""
        return self.model_dump(mode="json")
