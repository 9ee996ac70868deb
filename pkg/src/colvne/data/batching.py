"""
模块名称：batching
功能描述：按 (seed, epoch) 打乱的小批次下标序列，末尾不满一批的样本丢弃，
         使依赖批大小的统计量（列 softmax、batch_norm）始终看到同样的 N。
"""

from collections.abc import Sized

import numpy as np
import numpy.typing as npt

from colvne.utils import Stream, keyed_generator


def batch_iter(
    dataset: Sized | int, batch_size: int, epoch: int, seed: int
) -> list[npt.NDArray[np.int64]]:
    """
    Args:
        dataset: 数据集或样本数

    Raises:
        ValueError: batch_size < 1 或大于样本数
    """
    num_samples = dataset if isinstance(dataset, int) else len(dataset)
    if batch_size < 1 or batch_size > num_samples:
        raise ValueError(f"batch_size={batch_size} 必须在 [1, {num_samples}] 内")
    perm = keyed_generator(seed, int(Stream.BATCH), epoch).permutation(num_samples)
    full = num_samples // batch_size
    return [perm[b * batch_size : (b + 1) * batch_size].astype(np.int64) for b in range(full)]
