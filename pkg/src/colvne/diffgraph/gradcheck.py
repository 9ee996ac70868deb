"""
模块名称：gradcheck
功能描述：中心差分梯度校验。对给定的标量图构建函数，在指定点比较解析梯度与数值梯度，
         返回最大相对误差 |解析 − 数值| / max(1, |数值|)。
"""

from collections.abc import Callable, Mapping

import numpy as np

from colvne.linalg import Tensor

from .graph import Graph, Node

# 构建函数：在给定图上，用参数节点搭出标量损失
GraphBuilder = Callable[[Graph, dict[str, Node]], Node]

DEFAULT_STEP: float = 1e-5


def _evaluate(build: GraphBuilder, point: Mapping[str, Tensor]) -> float:
    g = Graph()
    params = {name: g.param(name, value) for name, value in point.items()}
    return build(g, params).item()


def analytic_gradients(build: GraphBuilder, point: Mapping[str, Tensor]) -> dict[str, Tensor]:
    """一次前向 + 反向，返回解析梯度。"""
    g = Graph()
    params = {name: g.param(name, value) for name, value in point.items()}
    return g.backward(build(g, params))


def grad_check(
    build: GraphBuilder, point: Mapping[str, Tensor], step: float = DEFAULT_STEP
) -> float:
    """
    中心差分梯度校验。

    Args:
        build: 图构建函数；每次扰动都会重新调用，因此不得修改外部状态
        point: {参数名: 取值}
        step: 差分步长

    Returns:
        float: 所有参数所有分量上的最大相对误差
    """
    point = {name: np.array(value, dtype=np.float64, copy=True) for name, value in point.items()}
    analytic = analytic_gradients(build, point)

    worst = 0.0
    for name, base in point.items():
        for idx in np.ndindex(base.shape):
            original = base[idx]
            base[idx] = original + step
            f_plus = _evaluate(build, point)
            base[idx] = original - step
            f_minus = _evaluate(build, point)
            base[idx] = original
            numeric = (f_plus - f_minus) / (2.0 * step)
            err = abs(float(analytic[name][idx]) - numeric) / max(1.0, abs(numeric))
            worst = max(worst, err)
    return worst
