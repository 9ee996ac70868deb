"""
测试公共夹具：固定 seed 的随机数发生器、极小规模的运行配置与数据集。
日志目录在导入 colvne 之前重定向到临时目录。
"""

import os
import tempfile
from pathlib import Path

os.environ.setdefault("COLVNE_LOG_DIR", str(Path(tempfile.gettempdir()) / "colvne-test-logs"))
os.environ.setdefault("COLVNE_LOG_LEVEL", "WARNING")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from colvne.cli.config import RunConfig  # noqa: E402
from colvne.data import DatasetSplits, generate_longtail  # noqa: E402

TINY_CONFIG: dict = {
    "epochs": 2,
    "warmup_epochs": 1,
    "batch_size": 8,
    "seed": 7,
    "longtail": {"num_classes": 3, "n_max": 20, "rho": 2.0, "image_size": 16},
    "augment": {"global_size": 16, "local_size": 8, "local_views": 1},
    "arch": {
        "encoder_widths": [4, 4, 8],
        "proj_hidden": 16,
        "proj_out": 8,
        "head_multipliers": [1.0, 2.0],
    },
    "eval": {"knn_k": 5, "probe_epochs": 3, "probe_batch": 16},
}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config() -> RunConfig:
    return RunConfig.model_validate(TINY_CONFIG)


@pytest.fixture
def tiny_splits(tiny_config: RunConfig) -> DatasetSplits:
    assert tiny_config.longtail is not None
    return generate_longtail(tiny_config.longtail, tiny_config.seed)


def random_unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    h = rng.standard_normal((n, d))
    return h / np.linalg.norm(h, axis=1, keepdims=True)
