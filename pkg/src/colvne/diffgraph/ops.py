"""
模块名称：ops
功能描述：计算图原语集合。每个原语计算标准前向结果并登记解析 VJP：
         矩阵乘、逐元素四则（带广播）、拼接/切片/转置/变形、求和/均值、log/exp、
         leaky_relu、带温度的行 softmax、batch_norm、行 L2 归一化、conv2d、max_pool2d、
         stop_gradient，以及供 VNE 等使用的自定义节点 custom()。
"""

from collections.abc import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from colvne.errors import ShapeError
from colvne.linalg import Tensor, l2_normalize_rows_with_count
from colvne.linalg.ops import ZERO_NORM_EPS

from .graph import VJP, Node, RunningStats

# ================= 默认超参 =================
LEAKY_SLOPE: float = 0.01
BN_MOMENTUM: float = 0.1
BN_EPS: float = 1e-5
LOG_FLOOR: float = 1e-12


# ────────────────────────────────────────────────────────────
# 工具函数
# ────────────────────────────────────────────────────────────


def _unbroadcast(g: Tensor, shape: tuple[int, ...]) -> Tensor:
    """把广播后的梯度按原形状求和还原。"""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, dim in enumerate(shape) if dim == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _broadcast_shape(a: Node, b: Node, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op} 形状无法广播: {a.shape} 与 {b.shape}") from None


def _require_ndim(a: Node, ndim: int, op: str) -> None:
    if a.value.ndim != ndim:
        raise ShapeError(f"{op} 需要 {ndim} 维输入，实际 shape={a.shape}")


# ────────────────────────────────────────────────────────────
# 线性代数与逐元素运算
# ────────────────────────────────────────────────────────────


def matmul(a: Node, b: Node) -> Node:
    _require_ndim(a, 2, "matmul")
    _require_ndim(b, 2, "matmul")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul 内维不一致: {a.shape} × {b.shape}")
    av, bv = a.value, b.value

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g @ bv.T, av.T @ g]

    return a.graph.record("matmul", [a, b], av @ bv, vjp)


def add(a: Node, b: Node) -> Node:
    _broadcast_shape(a, b, "add")
    sa, sb = a.shape, b.shape

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [_unbroadcast(g, sa), _unbroadcast(g, sb)]

    return a.graph.record("add", [a, b], a.value + b.value, vjp)


def sub(a: Node, b: Node) -> Node:
    _broadcast_shape(a, b, "sub")
    sa, sb = a.shape, b.shape

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [_unbroadcast(g, sa), _unbroadcast(-g, sb)]

    return a.graph.record("sub", [a, b], a.value - b.value, vjp)


def mul(a: Node, b: Node) -> Node:
    """逐元素乘（带广播）。"""
    _broadcast_shape(a, b, "mul")
    av, bv = a.value, b.value

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [_unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)]

    return a.graph.record("mul", [a, b], av * bv, vjp)


def div(a: Node, b: Node) -> Node:
    """逐元素除（带广播）。"""
    _broadcast_shape(a, b, "div")
    av, bv = a.value, b.value
    out = av / bv

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [_unbroadcast(g / bv, av.shape), _unbroadcast(-g * out / bv, bv.shape)]

    return a.graph.record("div", [a, b], out, vjp)


def scale(a: Node, c: float) -> Node:
    """乘以标量常数。"""
    c = float(c)

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [c * g]

    return a.graph.record("scale", [a], c * a.value, vjp)


def shift(a: Node, c: float) -> Node:
    """加上标量常数。"""

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g]

    return a.graph.record("shift", [a], a.value + float(c), vjp)


# ────────────────────────────────────────────────────────────
# 形状变换
# ────────────────────────────────────────────────────────────


def transpose(a: Node) -> Node:
    _require_ndim(a, 2, "transpose")

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g.T]

    return a.graph.record("transpose", [a], a.value.T.copy(), vjp)


def reshape(a: Node, shape: tuple[int, ...]) -> Node:
    src = a.shape
    try:
        out = a.value.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape 无法把 {src} 变为 {shape}") from None

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g.reshape(src)]

    return a.graph.record("reshape", [a], out, vjp)


def slice_rows(a: Node, start: int, stop: int) -> Node:
    """取第 [start, stop) 行。"""
    rows = a.shape[0]
    if not 0 <= start < stop <= rows:
        raise ShapeError(f"slice_rows 越界: [{start}, {stop}) / {rows}")
    src = a.shape

    def vjp(g: Tensor) -> list[Tensor | None]:
        full = np.zeros(src)
        full[start:stop] = g
        return [full]

    return a.graph.record("slice_rows", [a], a.value[start:stop].copy(), vjp)


def concat_rows(nodes: Sequence[Node]) -> Node:
    """沿第 0 维拼接。"""
    if not nodes:
        raise ShapeError("concat_rows 至少需要一个输入")
    tails = {n.shape[1:] for n in nodes}
    if len(tails) != 1:
        raise ShapeError(f"concat_rows 除第 0 维外形状必须一致: {sorted(tails)}")
    bounds = np.cumsum([0] + [n.shape[0] for n in nodes])

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g[bounds[i] : bounds[i + 1]] for i in range(len(nodes))]

    value = np.concatenate([n.value for n in nodes], axis=0)
    return nodes[0].graph.record("concat_rows", list(nodes), value, vjp)


# ────────────────────────────────────────────────────────────
# 归约
# ────────────────────────────────────────────────────────────


def sum(a: Node, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Node:
    src = a.shape

    def vjp(g: Tensor) -> list[Tensor | None]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return [np.broadcast_to(g, src).copy()]

    return a.graph.record("sum", [a], np.sum(a.value, axis=axis, keepdims=keepdims), vjp)


def mean(a: Node, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Node:
    src = a.shape
    count = a.value.size if axis is None else int(np.prod([src[i] for i in np.atleast_1d(axis)]))

    def vjp(g: Tensor) -> list[Tensor | None]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return [np.broadcast_to(g / count, src).copy()]

    return a.graph.record("mean", [a], np.mean(a.value, axis=axis, keepdims=keepdims), vjp)


# ────────────────────────────────────────────────────────────
# 非线性
# ────────────────────────────────────────────────────────────


def log(a: Node, floor: float = LOG_FLOOR) -> Node:
    """自然对数，参数在 floor 处截断；被截断的位置梯度为 0。"""
    av = a.value
    active = av > floor

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [np.where(active, g / np.where(active, av, 1.0), 0.0)]

    return a.graph.record("log", [a], np.log(np.maximum(av, floor)), vjp)


def exp(a: Node) -> Node:
    out = np.exp(a.value)

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g * out]

    return a.graph.record("exp", [a], out, vjp)


def leaky_relu(a: Node, slope: float = LEAKY_SLOPE) -> Node:
    slope_map = np.where(a.value > 0, 1.0, slope)

    def vjp(g: Tensor) -> list[Tensor | None]:
        return [g * slope_map]

    return a.graph.record("leaky_relu", [a], a.value * slope_map, vjp)


def softmax_rows(x: Tensor, temperature: float = 1.0) -> Tensor:
    """数值稳定的行 softmax(x/τ)，纯 numpy 版本。"""
    if temperature <= 0:
        raise ValueError(f"softmax 温度必须为正数，实际为 {temperature}")
    z = np.asarray(x, dtype=np.float64) / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def row_softmax(a: Node, temperature: float = 1.0) -> Node:
    """逐行 softmax(x/τ)，先减行最大值保证数值稳定。"""
    _require_ndim(a, 2, "row_softmax")
    y = softmax_rows(a.value, temperature)

    def vjp(g: Tensor) -> list[Tensor | None]:
        inner = np.sum(g * y, axis=1, keepdims=True)
        return [y * (g - inner) / temperature]

    return a.graph.record("row_softmax", [a], y, vjp, meta={"temperature": temperature})


def l2_normalize_rows(a: Node) -> Node:
    """逐行 L2 归一化；零行替换为 e₁ 且不回传梯度，替换数量写入 meta。"""
    _require_ndim(a, 2, "l2_normalize_rows")
    y, zero_count = l2_normalize_rows_with_count(a.value)
    norms = np.linalg.norm(a.value, axis=1, keepdims=True)
    live = norms > ZERO_NORM_EPS

    def vjp(g: Tensor) -> list[Tensor | None]:
        inner = np.sum(g * y, axis=1, keepdims=True)
        safe = np.where(live, norms, 1.0)
        return [np.where(live, (g - y * inner) / safe, 0.0)]

    return a.graph.record("l2_normalize_rows", [a], y, vjp, meta={"zero_rows": zero_count})


# ────────────────────────────────────────────────────────────
# 归一化与卷积
# ────────────────────────────────────────────────────────────


def batch_norm(
    x: Node,
    gamma: Node,
    beta: Node,
    stats: RunningStats | None,
    *,
    training: bool,
    momentum: float = BN_MOMENTUM,
    eps: float = BN_EPS,
) -> Node:
    """
    批归一化，支持 (N, F) 与 (N, C, H, W) 两种布局。

    训练模式用当前批统计量并原地更新 stats（滑动方差取无偏估计）；
    评估模式是固定仿射变换，只依赖 stats。
    """
    xv = x.value
    if xv.ndim == 2:
        axes: tuple[int, ...] = (0,)
        bshape: tuple[int, ...] = (1, xv.shape[1])
    elif xv.ndim == 4:
        axes = (0, 2, 3)
        bshape = (1, xv.shape[1], 1, 1)
    else:
        raise ShapeError(f"batch_norm 只支持 2 维或 4 维输入，实际 shape={xv.shape}")
    features = xv.shape[1]
    if gamma.shape != (features,) or beta.shape != (features,):
        raise ShapeError(f"batch_norm 仿射参数形状应为 ({features},)")

    g_b = gamma.value.reshape(bshape)
    count = xv.size // features

    if training:
        mu = xv.mean(axis=axes)
        var = xv.var(axis=axes)
        if stats is not None:
            unbiased = var * count / (count - 1) if count > 1 else var
            stats.mean[...] = (1.0 - momentum) * stats.mean + momentum * mu
            stats.var[...] = (1.0 - momentum) * stats.var + momentum * unbiased
    else:
        if stats is None:
            raise ValueError("评估模式的 batch_norm 需要滑动统计量")
        mu = stats.mean.copy()
        var = stats.var.copy()

    inv_std = (1.0 / np.sqrt(var + eps)).reshape(bshape)
    xhat = (xv - mu.reshape(bshape)) * inv_std
    out = g_b * xhat + beta.value.reshape(bshape)

    def vjp(g: Tensor) -> list[Tensor | None]:
        dgamma = np.sum(g * xhat, axis=axes)
        dbeta = np.sum(g, axis=axes)
        dxhat = g * g_b
        if training:
            dx = (
                inv_std
                / count
                * (
                    count * dxhat
                    - np.sum(dxhat, axis=axes, keepdims=True)
                    - xhat * np.sum(dxhat * xhat, axis=axes, keepdims=True)
                )
            )
        else:
            dx = dxhat * inv_std
        return [dx, dgamma, dbeta]

    return x.graph.record(
        "batch_norm", [x, gamma, beta], out, vjp, meta={"training": training}
    )


def conv2d(x: Node, w: Node, b: Node | None = None, *, stride: int = 1, padding: int = 1) -> Node:
    """
    二维卷积（im2col 实现），x: (N, C, H, W)，w: (O, C, kh, kw)，b: (O,)。
    """
    _require_ndim(x, 4, "conv2d")
    _require_ndim(w, 4, "conv2d")
    n, c, h, wd = x.shape
    o, cw, kh, kw = w.shape
    if c != cw:
        raise ShapeError(f"conv2d 输入通道 {c} 与卷积核通道 {cw} 不一致")
    if b is not None and b.shape != (o,):
        raise ShapeError(f"conv2d 偏置形状应为 ({o},)，实际 {b.shape}")
    p, s = padding, stride
    xp = np.pad(x.value, ((0, 0), (0, 0), (p, p), (p, p)))
    hp, wp = xp.shape[2], xp.shape[3]
    if hp < kh or wp < kw:
        raise ShapeError(f"conv2d 输入过小: {(h, wd)}，卷积核 {(kh, kw)}")
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::s, ::s]
    ho, wo = windows.shape[2], windows.shape[3]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * kh * kw)
    wmat = w.value.reshape(o, -1)
    out = cols @ wmat.T
    if b is not None:
        out = out + b.value
    out = np.ascontiguousarray(out.reshape(n, ho, wo, o).transpose(0, 3, 1, 2))

    def vjp(g: Tensor) -> list[Tensor | None]:
        gmat = g.transpose(0, 2, 3, 1).reshape(-1, o)
        dw = (gmat.T @ cols).reshape(w.value.shape)
        dcols = (gmat @ wmat).reshape(n, ho, wo, c, kh, kw)
        dxp = np.zeros((n, c, hp, wp))
        for i in range(kh):
            for j in range(kw):
                dxp[:, :, i : i + s * ho : s, j : j + s * wo : s] += dcols[..., i, j].transpose(
                    0, 3, 1, 2
                )
        dx = dxp[:, :, p : p + h, p : p + wd]
        grads: list[Tensor | None] = [np.ascontiguousarray(dx), dw]
        if b is not None:
            grads.append(gmat.sum(axis=0))
        return grads

    inputs = [x, w] if b is None else [x, w, b]
    return x.graph.record("conv2d", inputs, out, vjp, meta={"stride": s, "padding": p})


def max_pool2d(x: Node, size: int = 2) -> Node:
    """不重叠 size×size 最大池化；奇数边丢弃末行/末列，并列最大值取窗口内第一个。"""
    _require_ndim(x, 4, "max_pool2d")
    n, c, h, w = x.shape
    ho, wo = h // size, w // size
    if ho == 0 or wo == 0:
        raise ShapeError(f"max_pool2d 输入过小: {(h, w)}，窗口 {size}")
    cropped = x.value[:, :, : ho * size, : wo * size]
    blocks = (
        cropped.reshape(n, c, ho, size, wo, size)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho, wo, size * size)
    )
    idx = np.argmax(blocks, axis=-1)[..., None]
    out = np.take_along_axis(blocks, idx, axis=-1)[..., 0]

    def vjp(g: Tensor) -> list[Tensor | None]:
        dblocks = np.zeros((n, c, ho, wo, size * size))
        np.put_along_axis(dblocks, idx, g[..., None], axis=-1)
        dcrop = (
            dblocks.reshape(n, c, ho, wo, size, size)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(n, c, ho * size, wo * size)
        )
        dx = np.zeros((n, c, h, w))
        dx[:, :, : ho * size, : wo * size] = dcrop
        return [dx]

    return x.graph.record("max_pool2d", [x], out, vjp, meta={"size": size})


# ────────────────────────────────────────────────────────────
# 梯度控制与自定义节点
# ────────────────────────────────────────────────────────────


def stop_gradient(a: Node) -> Node:
    """前向恒等，反向截断。"""
    return a.graph.record("stop_gradient", [a], a.value.copy(), None, differentiable=False)


def custom(op: str, inputs: Sequence[Node], value: Tensor, vjp: VJP) -> Node:
    """登记一个带解析 VJP 的自定义节点（如 VNE），不对其内部迭代过程求导。"""
    if not inputs:
        raise ShapeError(f"自定义节点 {op} 至少需要一个输入")
    return inputs[0].graph.record(op, list(inputs), value, vjp)
