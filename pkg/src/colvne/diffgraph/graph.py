"""
模块名称：graph
功能描述：基于磁带（tape）的反向模式自动微分核心：节点、计算图与反向传播。

设计要点:
    - 节点按创建顺序追加，天然构成拓扑序（输入一定先于输出）
    - 仅一阶导数；每个原语在前向时登记自己的向量-雅可比积（VJP）闭包
    - 参数节点登记在参数表中，backward() 返回 {参数名: 梯度}
    - 一个 Graph 实例只允许执行一次 backward，且只在单线程内使用
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from colvne.errors import ColvneError, ShapeError
from colvne.linalg import Tensor

# VJP：给定输出梯度，返回每个输入的梯度（常量输入可返回 None）
VJP = Callable[[Tensor], Sequence[Tensor | None]]


class GraphError(ColvneError):
    """计算图使用方式错误：跨图引用、重复反传、损失节点不是标量等"""


@dataclass(eq=False)
class Node:
    """计算图中的一个节点。value 在前向后固定，grad 形状与 value 一致。"""

    id: int
    op: str
    inputs: tuple[int, ...]
    value: Tensor
    graph: "Graph" = field(repr=False)
    requires_grad: bool = False
    name: str | None = None
    grad: Tensor | None = field(default=None, repr=False)
    meta: dict[str, Any] = field(default_factory=dict, repr=False)
    vjp: VJP | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.value.shape)

    def item(self) -> float:
        """标量节点取值。"""
        if self.value.size != 1:
            raise ShapeError(f"节点 {self.op}#{self.id} 不是标量，shape={self.shape}")
        return float(self.value.reshape(()))


@dataclass
class RunningStats:
    """batch_norm 的滑动均值/方差（按特征或通道），训练模式前向时原地更新。"""

    mean: Tensor
    var: Tensor

    @classmethod
    def fresh(cls, features: int) -> "RunningStats":
        return cls(mean=np.zeros(features), var=np.ones(features))

    def copy(self) -> "RunningStats":
        return RunningStats(mean=self.mean.copy(), var=self.var.copy())


class Graph:
    """
    反向模式自动微分的计算图。

    使用示例::

        g = Graph()
        w = g.param("w", np.ones((3, 2)))
        x = g.constant(np.arange(6.0).reshape(2, 3))
        loss = ops.sum(ops.matmul(x, w))
        grads = g.backward(loss)   # {"w": ...}
    """

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.parameters: dict[str, Node] = {}
        self._backward_done = False

    # ──────────────────────────────────────────────────
    # 节点登记
    # ──────────────────────────────────────────────────

    def record(
        self,
        op: str,
        inputs: Sequence[Node],
        value: Tensor,
        vjp: VJP | None,
        *,
        differentiable: bool = True,
        meta: dict[str, Any] | None = None,
    ) -> Node:
        """登记一个由原语产生的节点。无需梯度时丢弃 VJP 闭包以释放中间量。"""
        for inp in inputs:
            if inp.graph is not self:
                raise GraphError(f"节点 {inp.op}#{inp.id} 属于另一个计算图")
        requires_grad = differentiable and any(inp.requires_grad for inp in inputs)
        node = Node(
            id=len(self.nodes),
            op=op,
            inputs=tuple(inp.id for inp in inputs),
            value=np.asarray(value, dtype=np.float64),
            graph=self,
            requires_grad=requires_grad,
            vjp=vjp if requires_grad else None,
            meta=meta or {},
        )
        self.nodes.append(node)
        return node

    def param(self, name: str, value: Tensor) -> Node:
        """登记一个可训练参数叶子节点。"""
        if name in self.parameters:
            raise GraphError(f"参数名重复: {name}")
        node = Node(
            id=len(self.nodes),
            op="param",
            inputs=(),
            value=np.array(value, dtype=np.float64, copy=True),
            graph=self,
            requires_grad=True,
            name=name,
        )
        self.nodes.append(node)
        self.parameters[name] = node
        return node

    def constant(self, value: Tensor | float, name: str | None = None) -> Node:
        """登记一个常量叶子节点（不接收梯度）。"""
        node = Node(
            id=len(self.nodes),
            op="constant",
            inputs=(),
            value=np.array(value, dtype=np.float64, copy=True),
            graph=self,
            name=name,
        )
        self.nodes.append(node)
        return node

    # ──────────────────────────────────────────────────
    # 反向传播
    # ──────────────────────────────────────────────────

    def backward(self, loss: Node) -> dict[str, Tensor]:
        """
        从标量损失节点反向传播，返回全部参数的梯度。

        Raises:
            GraphError: 损失节点不属于本图、不是标量，或本图已经反传过
        """
        if loss.graph is not self:
            raise GraphError("损失节点不属于当前计算图")
        if loss.value.size != 1:
            raise GraphError(f"损失节点必须为标量，实际 shape={loss.shape}")
        if self._backward_done:
            raise GraphError("该计算图已执行过 backward，请重新构建")
        self._backward_done = True

        loss.grad = np.ones_like(loss.value)
        for node in reversed(self.nodes[: loss.id + 1]):
            if node.grad is None or node.vjp is None:
                continue
            input_grads = node.vjp(node.grad)
            for inp_id, g in zip(node.inputs, input_grads, strict=True):
                if g is None:
                    continue
                inp = self.nodes[inp_id]
                if not inp.requires_grad:
                    continue
                if g.shape != inp.value.shape:
                    raise ShapeError(
                        f"{node.op}#{node.id} 的 VJP 对输入 {inp.op}#{inp.id} 返回了错误形状: "
                        f"{g.shape} != {inp.value.shape}"
                    )
                inp.grad = g if inp.grad is None else inp.grad + g
            # 中间节点梯度用完即弃
            if node.op != "param":
                node.grad = None

        return {
            name: (p.grad if p.grad is not None else np.zeros_like(p.value))
            for name, p in self.parameters.items()
        }
