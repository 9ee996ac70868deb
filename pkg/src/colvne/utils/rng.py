"""
模块名称：rng
功能描述：可复现的计数器式随机数流。所有随机性都从 (seed, 用途标签, epoch, 样本下标) 这样的
         键派生，底层为 numpy 的 Philox（计数器式 bit generator），因此并行增强、断点续训
         都不会改变结果。
"""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """随机数用途标签，作为派生键的第一段，保证不同用途的流互不重叠。"""

    DATA = 1
    BATCH = 2
    AUGMENT = 3
    INIT = 4
    PROBE = 5
    SPLIT = 6
    CHECK = 7


def keyed_generator(seed: int, *keys: int) -> np.random.Generator:
    """
    由 (seed, *keys) 派生一个独立的 Generator。

    同一组键永远得到同一条流；键中任一位置不同即得到统计独立的流。
    """
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError(f"随机数键必须为非负整数: seed={seed}, keys={keys}")
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))
