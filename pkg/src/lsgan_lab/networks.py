"""Fully-connected generator/discriminator and the label embedding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .autodiff import Graph, Node, ShapeError, as_matrix

ACTIVATIONS = ("relu", "leaky_relu", "tanh")
HEADS = ("linear", "sigmoid")
LEAKY_SLOPE = 0.2


@dataclass
class MlpParams:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    output_head: str = "linear"
    seed: int = 0

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("need one weight matrix and one bias per layer transition")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_sizes[i], self.layer_sizes[i + 1])
            if w.shape != want or b.shape != (want[1],):
                raise ShapeError(f"layer {i}: weight {w.shape}, bias {b.shape}; expected {want}")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_head not in HEADS:
            raise ValueError(f"unknown output head {self.output_head!r}")

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def arrays(self) -> list[np.ndarray]:
        """Parameters in a fixed order: w0, b0, w1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def with_arrays(self, arrays) -> "MlpParams":
        arrays = list(arrays)
        return MlpParams(self.layer_sizes, [np.array(a) for a in arrays[0::2]],
                         [np.array(a) for a in arrays[1::2]],
                         self.hidden_activation, self.output_head, self.seed)


def init_mlp(layer_sizes, hidden_activation="relu", output_head="linear", seed=0,
             purpose=_rng.INIT_G) -> MlpParams:
    """He-normal weights (std ``sqrt(2 / fan_in)``), zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError(f"need at least 2 layer sizes, got {list(layer_sizes)}")
    if any(s <= 0 for s in sizes):
        raise ValueError(f"layer sizes must be positive, got {sizes}")
    g = _rng.stream(seed, purpose)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        std = np.sqrt(2.0 / fan_in)
        weights.append(std * _rng.box_muller(g, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(tuple(sizes), weights, biases, hidden_activation, output_head, seed)


@dataclass
class Bound:
    """Parameter nodes of one network placed on a graph."""

    params: MlpParams
    weights: list[Node]
    biases: list[Node]

    def nodes(self) -> list[Node]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out


def bind(graph: Graph, params: MlpParams, trainable: bool = True) -> Bound:
    """Place ``params`` on ``graph``; non-trainable nodes act as constants."""
    ws = [graph.input(w, trainable=trainable) for w in params.weights]
    bs = [graph.input(b.reshape(1, -1), trainable=trainable) for b in params.biases]
    return Bound(params, ws, bs)


def _activate(graph, x, kind):
    if kind == "relu":
        return graph.relu(x)
    if kind == "leaky_relu":
        return graph.leaky_relu(x, LEAKY_SLOPE)
    return graph.tanh(x)


def mlp_forward(graph: Graph, bound: Bound, x: Node) -> Node:
    p = bound.params
    if x.value.shape[1] != p.in_dim:
        raise ShapeError(f"input has {x.value.shape[1]} columns, network expects {p.in_dim}")
    ones = graph.constant(np.ones((x.value.shape[0], 1)))
    h = x
    last = len(bound.weights) - 1
    for i, (w, b) in enumerate(zip(bound.weights, bound.biases)):
        h = graph.add(graph.matmul(h, w), graph.matmul(ones, b))
        if i < last:
            h = _activate(graph, h, p.hidden_activation)
    if p.output_head == "sigmoid":
        h = graph.sigmoid(h)
    return h


def _prepare(params, x, graph, bound, trainable):
    if graph is None:
        graph = x.graph if isinstance(x, Node) else Graph()
    if bound is None:
        bound = bind(graph, params, trainable)
    if not isinstance(x, Node):
        x = graph.constant(as_matrix(x))
    return graph, bound, x


def generator_forward(params: MlpParams, z, *, graph: Graph | None = None,
                      bound: Bound | None = None, trainable: bool = True) -> Node:
    """Map latent batch ``z`` to data space.  Returns the output node."""
    if params.output_head != "linear":
        raise ValueError("generator must use a linear output head")
    graph, bound, z = _prepare(params, z, graph, bound, trainable)
    return mlp_forward(graph, bound, z)


def discriminator_forward(params: MlpParams, x, *, graph: Graph | None = None,
                          bound: Bound | None = None, trainable: bool = True) -> Node:
    """Score a batch.  Output is ``(batch, 1)``."""
    if params.out_dim != 1:
        raise ShapeError(f"discriminator must output 1 column, has {params.out_dim}")
    graph, bound, x = _prepare(params, x, graph, bound, trainable)
    return mlp_forward(graph, bound, x)


@dataclass
class LabelEmbed:
    """Bias-free linear map from one-hot labels to a small code."""

    mapping_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.mapping_matrix = np.asarray(self.mapping_matrix, dtype=np.float64)
        if self.mapping_matrix.ndim != 2:
            raise ShapeError("mapping matrix must be 2-D")
        if self.embed_dim > self.num_classes:
            raise ValueError(
                f"embed_dim {self.embed_dim} exceeds num_classes {self.num_classes}")

    @property
    def num_classes(self) -> int:
        return self.mapping_matrix.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.mapping_matrix.shape[1]


def init_label_embed(num_classes: int, embed_dim: int, seed: int = 0) -> LabelEmbed:
    if not 0 < embed_dim < num_classes:
        raise ValueError(f"need 0 < embed_dim < num_classes, got {embed_dim}, {num_classes}")
    g = _rng.stream(seed, _rng.INIT_EMBED)
    return LabelEmbed(_rng.box_muller(g, (num_classes, embed_dim)))


def one_hot(labels, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.shape[0], num_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def check_one_hot(y: np.ndarray, num_classes: int):
    y = np.asarray(y)
    if y.ndim != 2 or y.shape[1] != num_classes:
        raise ShapeError(f"labels must be (batch, {num_classes}), got {y.shape}")
    if not (np.all((y == 0) | (y == 1)) and np.all(y.sum(axis=1) == 1)):
        raise ValueError("labels are not one-hot")


@dataclass
class ConditionalOutputs:
    generated: Node
    real_scores: Node
    fake_scores: Node
    graph: Graph
    g: Bound
    d: Bound
    embed: Node


def conditional_forward(g: MlpParams, d: MlpParams, embed: LabelEmbed, z, x, y_onehot, *,
                        graph: Graph | None = None, train_g: bool = True,
                        train_d: bool = True, train_embed: bool = True) -> ConditionalOutputs:
    """Condition both networks on ``embed(y)`` by input concatenation.

    The generated batch and the real batch share the labels ``y_onehot``.
    """
    y = np.asarray(y_onehot, dtype=np.float64)
    check_one_hot(y, embed.num_classes)
    z, x = as_matrix(z), as_matrix(x)
    if not (z.shape[0] == x.shape[0] == y.shape[0]):
        raise ShapeError(f"batch sizes differ: z {z.shape}, x {x.shape}, y {y.shape}")
    if g.in_dim != z.shape[1] + embed.embed_dim:
        raise ShapeError(f"generator input {g.in_dim} != latent {z.shape[1]} + embed {embed.embed_dim}")
    if d.in_dim != x.shape[1] + embed.embed_dim:
        raise ShapeError(f"discriminator input {d.in_dim} != data {x.shape[1]} + embed {embed.embed_dim}")

    graph = graph or Graph()
    gb = bind(graph, g, train_g)
    db = bind(graph, d, train_d)
    m = graph.input(embed.mapping_matrix, trainable=train_embed)
    code = graph.matmul(graph.constant(y), m)

    gen = generator_forward(g, graph.concat(graph.constant(z), code), graph=graph, bound=gb)
    real = discriminator_forward(d, graph.concat(graph.constant(x), code), graph=graph, bound=db)
    fake = discriminator_forward(d, graph.concat(gen, code), graph=graph, bound=db)
    return ConditionalOutputs(gen, real, fake, graph, gb, db, m)
