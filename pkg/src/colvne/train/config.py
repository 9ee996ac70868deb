"""
模块名称：config
功能描述：训练配置（Pydantic 模型），汇总优化器、学习率调度、损失、网络结构、增强、数据与评测参数。

桌面规模默认值：峰值学习率 0.4、起始 0.04、终值 0.0004、预热 5 个 epoch、共 50 个 epoch、
动量 0.9、权重衰减 1e-6、批大小 64、关闭 LARS。
"""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from colvne.augment.config import AugmentConfig
from colvne.data.config import LongTailSpec
from colvne.evaluation.config import EvalConfig
from colvne.losses.config import LossConfig
from colvne.model.config import ArchitectureConfig


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(default=50, ge=0, description="训练轮数")
    warmup_epochs: int = Field(default=5, ge=0, description="线性预热轮数")
    peak_lr: float = Field(default=0.4, gt=0.0)
    start_lr: float = Field(default=0.04, gt=0.0)
    final_lr: float = Field(default=0.0004, gt=0.0)
    weight_decay: float = Field(default=1e-6, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=64, ge=2)
    seed: int = Field(default=0, ge=0, lt=2**64)
    lars_enabled: bool = Field(default=False, description="按参数张量的信任比缩放学习率")
    checkpoint_every: int = Field(default=1, ge=1, description="每隔多少个 epoch 写一次检查点")

    loss: LossConfig = Field(default_factory=LossConfig)
    arch: ArchitectureConfig = Field(default_factory=ArchitectureConfig)
    augment: AugmentConfig = Field(default_factory=AugmentConfig)
    longtail: LongTailSpec | None = Field(
        default_factory=LongTailSpec, description="合成数据参数；与 data_dir 二选一"
    )
    data_dir: Path | None = Field(default=None, description="磁盘图像目录")
    eval: EvalConfig = Field(default_factory=EvalConfig)

    @model_validator(mode="after")
    def _check_consistency(self) -> "TrainConfig":
        if self.epochs > 0 and self.warmup_epochs >= self.epochs:
            raise ValueError(
                f"warmup_epochs={self.warmup_epochs} 必须小于 epochs={self.epochs}"
            )
        if self.data_dir is not None:
            self.longtail = None
        if self.longtail is None and self.data_dir is None:
            raise ValueError("longtail 与 data_dir 至少提供一个")

        updates: dict[str, int] = {}
        if "input_size" not in self.arch.model_fields_set:
            updates["input_size"] = self.augment.global_size
        elif self.arch.input_size != self.augment.global_size:
            raise ValueError(
                f"arch.input_size={self.arch.input_size} 必须等于 "
                f"augment.global_size={self.augment.global_size}"
            )
        if self.longtail is not None:
            if "num_classes" not in self.arch.model_fields_set:
                updates["num_classes"] = self.longtail.num_classes
            if self.augment.global_size > self.longtail.image_size:
                raise ValueError("augment.global_size 不能超过合成图像边长")
        if updates:
            self.arch = ArchitectureConfig.model_validate(
                {**self.arch.model_dump(exclude_unset=True), **updates}
            )
        return self
