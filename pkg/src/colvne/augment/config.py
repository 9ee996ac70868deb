"""
模块名称：config
功能描述：多裁剪数据增强的参数（Pydantic 模型）。默认值为桌面规模：32×32 全局视图、
         16×16 局部视图、每个样本 2 个局部视图。
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AugmentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    global_size: int = Field(default=32, ge=2, description="全局视图边长 g")
    local_size: int = Field(default=16, ge=2, description="局部视图边长 l")
    local_views: int = Field(default=2, ge=0, description="每个样本的局部视图数 V")
    global_scale: tuple[float, float] = Field(
        default=(0.5, 1.0), description="全局裁剪面积占原图比例区间"
    )
    local_scale: tuple[float, float] = Field(
        default=(0.15, 0.5), description="局部裁剪面积占原图比例区间"
    )
    jitter: tuple[float, float] = Field(
        default=(0.6, 1.4), description="亮度/对比度/饱和度缩放因子区间"
    )
    blur_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="高斯模糊概率")
    blur_sigma: tuple[float, float] = Field(default=(0.1, 2.0), description="高斯模糊 σ 区间")
    flip_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="水平翻转概率")

    @model_validator(mode="after")
    def _check_ranges(self) -> "AugmentConfig":
        if self.local_size > self.global_size:
            raise ValueError(
                f"局部视图不能大于全局视图: local_size={self.local_size} > {self.global_size}"
            )
        for name in ("global_scale", "local_scale", "jitter", "blur_sigma"):
            lo, hi = getattr(self, name)
            if not 0.0 < lo <= hi:
                raise ValueError(f"{name} 区间非法: ({lo}, {hi})")
        for name in ("global_scale", "local_scale"):
            if getattr(self, name)[1] > 1.0:
                raise ValueError(f"{name} 上限不能超过 1.0")
        return self

    @property
    def views_per_sample(self) -> int:
        return 2 + self.local_views
