"""
模块名称：errors
功能描述：项目统一异常定义。每类异常携带 CLI 退出码，命令行层据此决定进程返回值。
"""


class ColvneError(Exception):
    """项目基础异常"""

    exit_code: int = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)


class ConfigError(ColvneError):
    """配置非法：未知字段、取值越界、配置文件缺失或无法解析"""

    exit_code = 1


class ShapeError(ColvneError, ValueError):
    """张量形状不满足算子约束"""

    exit_code = 1


class DataIOError(ColvneError):
    """数据或文件读写失败：PPM 头损坏、标签缺失、路径不可写等"""

    exit_code = 2


class CheckpointError(DataIOError):
    """检查点文件损坏：魔数错误、版本不匹配、CRC 校验失败"""


class NumericalError(ColvneError):
    """数值失败：损失出现 NaN/Inf、特征分解不收敛、负特征值越界"""

    exit_code = 3

    def __init__(self, message: str, residual: float | None = None) -> None:
        self.residual = residual
        super().__init__(message)


class GradCheckError(ColvneError):
    """有限差分梯度校验未通过"""

    exit_code = 4

    def __init__(self, message: str, failures: dict[str, float] | None = None) -> None:
        self.failures = failures or {}
        super().__init__(message)
