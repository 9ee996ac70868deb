"""
模块名称：config
功能描述：网络结构描述（Pydantic 模型）：编码器类型与宽度、投影头、分类头倍率等。
         参数量、各分类头类别数都是它的纯函数。
"""

from enum import StrEnum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EncoderKind(StrEnum):
    TINY_CONV = "tiny-conv"
    MLP = "mlp"


class ArchitectureConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    encoder: EncoderKind = Field(default=EncoderKind.TINY_CONV, description="编码器类型")
    encoder_widths: tuple[int, ...] = Field(
        default=(16, 32, 64), description="tiny-conv 为 3 个卷积块通道数；mlp 为隐藏层宽度"
    )
    input_size: int = Field(default=32, ge=2, description="编码器输入边长")
    in_channels: Literal[3] = Field(default=3, description="输入通道数")
    proj_hidden: int = Field(default=256, ge=1, description="投影头隐藏层宽度")
    proj_layers: int = Field(default=2, ge=1, le=4, description="投影头隐藏层数")
    proj_out: int = Field(default=64, ge=2, description="投影输出维度 d")
    head_multipliers: tuple[float, ...] = Field(
        default=(0.5, 1.0, 1.5, 2.0), description="分类头类别数倍率"
    )
    num_classes: int = Field(default=6, ge=2, description="参考类别数 C")
    leaky_slope: float = Field(default=0.01, ge=0.0, lt=1.0)
    bn_momentum: float = Field(default=0.1, gt=0.0, le=1.0)
    bn_eps: float = Field(default=1e-5, gt=0.0)

    @model_validator(mode="after")
    def _check_layout(self) -> "ArchitectureConfig":
        if not self.encoder_widths or min(self.encoder_widths) < 1:
            raise ValueError("encoder_widths 不能为空且必须为正")
        if self.encoder == EncoderKind.TINY_CONV:
            if len(self.encoder_widths) != 3:
                raise ValueError("tiny-conv 编码器需要恰好 3 个卷积块宽度")
            if self.input_size < 8:
                raise ValueError("tiny-conv 编码器输入边长至少为 8（三次 2×2 池化）")
        if not self.head_multipliers or min(self.head_multipliers) <= 0:
            raise ValueError("head_multipliers 不能为空且必须为正")
        return self

    @property
    def head_sizes(self) -> list[int]:
        """每个分类头的类别数 max(2, round(m·C))，0.5 向上取整。"""
        return [max(2, int(m * self.num_classes + 0.5)) for m in self.head_multipliers]

    @property
    def feature_dim(self) -> int:
        return self.encoder_widths[-1]

    @property
    def primary_head(self) -> int:
        """倍率最接近 1 的分类头下标（1×C 头），用于评测与类别使用统计。"""
        return min(
            range(len(self.head_multipliers)),
            key=lambda i: (abs(self.head_multipliers[i] - 1.0), i),
        )
