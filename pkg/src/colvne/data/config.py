"""
模块名称：config
功能描述：合成长尾数据集的参数（Pydantic 模型）。
"""

from pydantic import BaseModel, ConfigDict, Field


class LongTailSpec(BaseModel):
    """
    类别 c 的样本数 = max(2, round(n_max · ρ^(−c/(C−1))))，随 c 单调不增。
    """

    model_config = ConfigDict(extra="forbid")

    num_classes: int = Field(default=6, ge=2, description="类别数 C")
    n_max: int = Field(default=400, ge=2, description="头部类别样本数")
    rho: float = Field(default=10.0, ge=1.0, description="不平衡比 ρ = 头部/尾部")
    image_size: int = Field(default=32, ge=8, description="图像边长")
    noise: float = Field(default=0.05, ge=0.0, description="高斯像素噪声 σ_n")
    val_fraction: float = Field(default=0.2, gt=0.0, lt=1.0, description="按类分层的验证集比例")
