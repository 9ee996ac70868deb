"""
模块名称：config
功能描述：评测参数（Pydantic 模型）：KNN、线性探针与训练期在线 KNN 监控。
"""

from pydantic import BaseModel, ConfigDict, Field

from colvne.model.network import EmbeddingSpace


class EvalConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    knn_k: int = Field(default=20, ge=1, description="KNN 近邻数 k")
    probe_epochs: int = Field(default=100, ge=0, description="线性探针训练轮数")
    probe_lr: float = Field(default=0.1, gt=0.0, description="线性探针初始学习率")
    probe_batch: int = Field(default=256, ge=1, description="线性探针批大小")
    knn_space: EmbeddingSpace = Field(
        default=EmbeddingSpace.PROJECTION, description="KNN 使用的表征空间"
    )
    probe_space: EmbeddingSpace = Field(
        default=EmbeddingSpace.BACKBONE, description="线性探针使用的表征空间（去掉投影头）"
    )
    online_knn: bool = Field(default=True, description="训练时每个 epoch 记录验证集 KNN top-1")
