"""
模块名称：config
功能描述：损失函数配置（Pydantic 模型），作为运行配置 JSON 的一部分，未知字段直接拒绝。
"""

from pydantic import BaseModel, ConfigDict, Field


class LossConfig(BaseModel):
    """总目标 = COL（或朴素交叉熵）− α·VNE 的可调参数。"""

    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=1.0, ge=0.0, description="VNE 惩罚系数 α")
    gamma: float = Field(
        default=-1.0, le=0.0, description="Optimized Loss 调制因子 γ（<0 启用，=0 关闭）"
    )
    enable_col: bool = Field(default=True, description="关闭时第一项退化为朴素交叉熵")
    enable_vne: bool = Field(default=True, description="关闭时不加 VNE 惩罚")
    tau_row: float = Field(default=0.1, gt=0.0, description="行 softmax 温度 τ_row")
    tau_col: float = Field(default=0.05, gt=0.0, description="列 softmax 温度 τ_col")
