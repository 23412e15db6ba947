"""Reverse-mode automatic differentiation over dense float64 matrices.

Every value is a 2-D array of shape ``(rows, cols)``; scalars are ``1x1``.
A :class:`Graph` is an append-only tape, so node order is already a valid
topological order and ``backward`` is a single reverse sweep over it.

Broadcasting is limited to a ``1x1`` operand against any array.  Row-wise
bias addition is expressed as ``ones(batch, 1) @ bias(1, h)`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence
import warnings

import numpy as np

OPS = (
    "input", "add", "sub", "mul", "matmul", "relu", "leaky_relu",
    "sigmoid", "tanh", "log", "square", "mean", "concat",
)

# largest float64 strictly below 1 and smallest positive normal
_SIG_HI = float(np.nextafter(1.0, 0.0))
_SIG_LO = float(np.finfo(np.float64).tiny)


class ShapeError(ValueError):
    pass


class Node:
    """One evaluated operation in a :class:`Graph`."""

    __slots__ = ("id", "op", "value", "grad", "parents", "attrs",
                 "requires_grad", "graph")

    def __init__(self, graph, id, op, value, parents=(), attrs=None,
                 requires_grad=False):
        self.graph = graph
        self.id = id
        self.op = op
        self.value = value
        self.grad = None
        self.parents = parents if type(parents) is tuple else tuple(parents)
        self.attrs = attrs or {}
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.value.shape

    def item(self) -> float:
        return float(self.value[0, 0])

    def __repr__(self):
        return f"Node(id={self.id}, op={self.op!r}, shape={self.value.shape})"

    # operator sugar; all arithmetic goes through the owning graph
    def __add__(self, other):
        return self.graph.add(self, other)

    def __radd__(self, other):
        return self.graph.add(other, self)

    def __sub__(self, other):
        return self.graph.sub(self, other)

    def __rsub__(self, other):
        return self.graph.sub(other, self)

    def __mul__(self, other):
        return self.graph.mul(self, other)

    def __rmul__(self, other):
        return self.graph.mul(other, self)

    def __matmul__(self, other):
        return self.graph.matmul(self, other)


def as_matrix(value) -> np.ndarray:
    """Coerce a scalar or 2-D array-like to a float64 matrix."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"expected a scalar or 2-D array, got shape {arr.shape}")
    return arr


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    # keep outputs strictly inside (0, 1) so log(p) and log(1 - p) stay finite
    return np.clip(out, _SIG_LO, _SIG_HI)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    if grad.shape == shape:
        return grad
    return np.array([[grad.sum()]])


class Graph:
    """Append-only computation tape.

    ``trainable`` holds the ids of parameter nodes; :meth:`backward`
    returns their gradients.
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self.trainable: set[int] = set()

    def _append(self, op, value, parents=(), attrs=None, requires_grad=None):
        if requires_grad is None:
            requires_grad = False
            for p in parents:
                if p.requires_grad:
                    requires_grad = True
                    break
        node = Node(self, len(self.nodes), op, value, parents, attrs, requires_grad)
        self.nodes.append(node)
        return node

    def _lift(self, x) -> Node:
        if isinstance(x, Node):
            if x.graph is not self:
                raise ValueError("node belongs to a different graph")
            return x
        return self.constant(x)

    # leaves

    def input(self, value, trainable: bool = False, requires_grad: bool | None = None) -> Node:
        """Add a leaf.  Trainable leaves always require grad."""
        arr = as_matrix(value)
        rg = trainable if requires_grad is None else (requires_grad or trainable)
        node = self._append("input", arr, requires_grad=rg)
        if trainable:
            self.trainable.add(node.id)
        return node

    def param(self, value) -> Node:
        return self.input(value, trainable=True)

    def constant(self, value) -> Node:
        return self.input(value, trainable=False)

    # generic dispatch

    def eval_op(self, kind: str, *operands, **attrs) -> Node:
        if kind not in OPS or kind == "input":
            raise ValueError(f"unknown operation {kind!r}")
        return getattr(self, kind)(*operands, **attrs)

    # elementwise binary

    def _binary(self, op, a, b, fn):
        a, b = self._lift(a), self._lift(b)
        sa, sb = a.value.shape, b.value.shape
        if sa != sb and sa != (1, 1) and sb != (1, 1):
            raise ShapeError(f"{op}: incompatible shapes {sa} and {sb}")
        return self._append(op, fn(a.value, b.value), (a, b))

    def add(self, a, b) -> Node:
        return self._binary("add", a, b, np.add)

    def sub(self, a, b) -> Node:
        return self._binary("sub", a, b, np.subtract)

    def mul(self, a, b) -> Node:
        return self._binary("mul", a, b, np.multiply)

    def matmul(self, a, b) -> Node:
        a, b = self._lift(a), self._lift(b)
        sa, sb = a.value.shape, b.value.shape
        if sa[1] != sb[0]:
            raise ShapeError(f"matmul: inner dimensions differ, {sa} @ {sb}")
        return self._append("matmul", a.value @ b.value, (a, b))

    # elementwise unary

    def relu(self, a) -> Node:
        a = self._lift(a)
        return self._append("relu", np.maximum(a.value, 0.0), (a,))

    def leaky_relu(self, a, slope: float = 0.2) -> Node:
        a = self._lift(a)
        x = a.value
        return self._append("leaky_relu", np.where(x > 0, x, slope * x), (a,),
                            {"slope": float(slope)})

    def sigmoid(self, a) -> Node:
        a = self._lift(a)
        return self._append("sigmoid", _stable_sigmoid(a.value), (a,))

    def tanh(self, a) -> Node:
        a = self._lift(a)
        return self._append("tanh", np.tanh(a.value), (a,))

    def log(self, a) -> Node:
        a = self._lift(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(a.value)
        return self._append("log", out, (a,))

    def square(self, a) -> Node:
        a = self._lift(a)
        return self._append("square", a.value * a.value, (a,))

    def mean(self, a) -> Node:
        a = self._lift(a)
        if a.value.size == 0:
            raise ShapeError("mean of an empty array")
        return self._append("mean", np.array([[a.value.mean()]]), (a,))

    def concat(self, *parts) -> Node:
        """Column-wise concatenation of matrices with equal row counts."""
        parts = [self._lift(p) for p in parts]
        if not parts:
            raise ShapeError("concat needs at least one operand")
        rows = {p.value.shape[0] for p in parts}
        if len(rows) != 1:
            shapes = ", ".join(str(p.value.shape) for p in parts)
            raise ShapeError(f"concat: row counts differ across {shapes}")
        return self._append("concat", np.concatenate([p.value for p in parts], axis=1),
                            parts)

    # reverse sweep

    def zero_grad(self):
        for node in self.nodes:
            node.grad = np.zeros_like(node.value)

    def backward(self, root: Node) -> dict[int, np.ndarray]:
        """Populate ``grad`` on every node and return trainable gradients.

        Grads are reset first, so repeated calls from the same root agree.
        Nodes that cannot reach a trainable leaf get a read-only zero grad.
        """
        if root.graph is not self:
            raise ValueError("root belongs to a different graph")
        if root.value.shape != (1, 1):
            raise ShapeError(f"backward root must be 1x1, got {root.value.shape}")
        for node in self.nodes:
            node.grad = None
        root.grad = np.ones((1, 1))
        for node in reversed(self.nodes[: root.id + 1]):
            if node.op == "input" or not node.requires_grad or node.grad is None:
                continue
            _BACKWARD[node.op](node)
        for node in self.nodes:
            if node.grad is None:
                if node.requires_grad:
                    node.grad = np.zeros_like(node.value)
                else:
                    node.grad = np.broadcast_to(0.0, node.value.shape)
        return {i: self.nodes[i].grad for i in sorted(self.trainable)}


def _acc(node: Node, g: np.ndarray):
    # never in place: the same array may be handed to several parents
    if node.requires_grad:
        node.grad = g if node.grad is None else node.grad + g


def _bw_add(n):
    a, b = n.parents
    _acc(a, _unbroadcast(n.grad, a.value.shape))
    _acc(b, _unbroadcast(n.grad, b.value.shape))


def _bw_sub(n):
    a, b = n.parents
    _acc(a, _unbroadcast(n.grad, a.value.shape))
    if b.requires_grad:
        _acc(b, -_unbroadcast(n.grad, b.value.shape))


def _bw_mul(n):
    a, b = n.parents
    if a.requires_grad:
        _acc(a, _unbroadcast(n.grad * b.value, a.value.shape))
    if b.requires_grad:
        _acc(b, _unbroadcast(n.grad * a.value, b.value.shape))


def _bw_matmul(n):
    a, b = n.parents
    if a.requires_grad:
        _acc(a, n.grad @ b.value.T)
    if b.requires_grad:
        _acc(b, a.value.T @ n.grad)


def _bw_relu(n):
    (a,) = n.parents
    # subgradient 0 at the kink
    _acc(a, n.grad * (a.value > 0))


def _bw_leaky_relu(n):
    (a,) = n.parents
    # negative-side slope at the kink
    slope = n.attrs["slope"]
    _acc(a, n.grad * np.where(a.value > 0, 1.0, slope))


def _bw_sigmoid(n):
    (a,) = n.parents
    s = n.value
    _acc(a, n.grad * s * (1.0 - s))


def _bw_tanh(n):
    (a,) = n.parents
    _acc(a, n.grad * (1.0 - n.value * n.value))


def _bw_log(n):
    (a,) = n.parents
    _acc(a, n.grad / a.value)


def _bw_square(n):
    (a,) = n.parents
    _acc(a, 2.0 * a.value * n.grad)


def _bw_mean(n):
    (a,) = n.parents
    _acc(a, np.full(a.value.shape, n.grad[0, 0] / a.value.size))


def _bw_concat(n):
    start = 0
    for p in n.parents:
        width = p.value.shape[1]
        _acc(p, n.grad[:, start:start + width])
        start += width


_BACKWARD = {
    "add": _bw_add, "sub": _bw_sub, "mul": _bw_mul, "matmul": _bw_matmul,
    "relu": _bw_relu, "leaky_relu": _bw_leaky_relu, "sigmoid": _bw_sigmoid,
    "tanh": _bw_tanh, "log": _bw_log, "square": _bw_square, "mean": _bw_mean,
    "concat": _bw_concat,
}


@dataclass
class GradCheck:
    max_error: float
    checked: int
    skipped: int
    # (autodiff, finite-difference) values at the worst coordinate
    worst_pair: tuple[float, float] = (0.0, 0.0)

    @property
    def degenerate(self) -> bool:
        return self.checked == 0


_KINK_OPS = ("relu", "leaky_relu")


def finite_diff_check(
    build: Callable[[Graph, list[Node]], Node],
    params: Sequence[np.ndarray],
    eps: float = 1e-4,
) -> GradCheck:
    """Compare autodiff gradients with central differences.

    ``build(graph, param_nodes)`` must construct a scalar loss from the
    given parameter nodes.  A coordinate is skipped when perturbing it
    moves some ReLU/LeakyReLU input whose magnitude is below ``10 * eps``.
    Relative error per coordinate is
    ``|g_ad - g_fd| / max(1e-12, |g_ad| + |g_fd|)``.
    """
    params = [as_matrix(p).copy() for p in params]

    def run(values):
        g = Graph()
        nodes = [g.param(v.copy()) for v in values]
        root = build(g, nodes)
        return g, nodes, root

    g, nodes, root = run(params)
    g.backward(root)
    analytic = [n.grad.copy() for n in nodes]

    def kink_inputs(graph):
        return [n.parents[0].value for n in graph.nodes if n.op in _KINK_OPS]

    base_kinks = kink_inputs(g)

    worst, checked, skipped = 0.0, 0, 0
    pair = (0.0, 0.0)
    for k, p in enumerate(params):
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + eps
            gp, _, fp = run(params)
            p[idx] = orig - eps
            gm, _, fm = run(params)
            p[idx] = orig

            near_kink = False
            for x0, xp, xm in zip(base_kinks, kink_inputs(gp), kink_inputs(gm)):
                moved = (xp != x0) | (xm != x0)
                if np.any(moved & (np.abs(x0) < 10 * eps)):
                    near_kink = True
                    break
            if near_kink:
                skipped += 1
                continue

            fd = (fp.item() - fm.item()) / (2 * eps)
            ad = analytic[k][idx]
            err = abs(ad - fd) / max(1e-12, abs(ad) + abs(fd))
            if err > worst:
                worst, pair = err, (float(ad), float(fd))
            checked += 1

    if checked == 0:
        warnings.warn("finite_diff_check: every coordinate was skipped", RuntimeWarning)
    return GradCheck(worst, checked, skipped, pair)
