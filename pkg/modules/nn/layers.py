"""
Graph Layers Module

Functional forward passes plus thin layer objects owning their parameters.
All activations are (nodes x features) tensors; biases are (1 x out) rows,
except the node-linear bias which is an (N x 1) column.

Classes:
    Layer: parameter container with Glorot initialization
    GraphConv, SAGEConv, EdgeConv: neighborhood layers over a GraphStructure
    NodeLinear: N x N map across nodes shared by all feature channels
    Dense: per-node affine map (shared MLP stage)
"""

# external imports
from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple

import numpy as np

# internal imports
from core.exceptions import DimensionError, TopologyMismatchError
from modules.autodiff import (
    Tensor,
    add,
    concat_cols,
    gather_rows,
    matmul,
    relu,
    row_max,
    segment_max,
    spmm,
    sub,
)
from modules.nn.graph import GraphStructure


def _check_nodes(op: str, h: Tensor, structure: GraphStructure) -> None:
    if h.shape[0] != structure.n_nodes:
        raise DimensionError(
            f"{op}: features have {h.shape[0]} rows for a graph with {structure.n_nodes} nodes"
        )


def dense_forward(h: Tensor, w: Tensor, b: Tensor) -> Tensor:
    return add(matmul(h, w), b)


def graph_conv_forward(h: Tensor, structure: GraphStructure, w: Tensor, b: Tensor) -> Tensor:
    """H' = D~^-1/2 (A + I) D~^-1/2 H W + b."""
    _check_nodes("graph_conv", h, structure)
    return add(spmm(structure.gcn, matmul(h, w)), b)


def sage_conv_forward(
    h: Tensor, structure: GraphStructure, w_self: Tensor, w_neigh: Tensor, b: Tensor
) -> Tensor:
    """h'_i = h_i W_self + mean_j h_j W_neigh + b; no neighbors -> zero neighbor term."""
    _check_nodes("sage_conv", h, structure)
    neighborhood = spmm(structure.mean, h)
    return add(add(matmul(h, w_self), matmul(neighborhood, w_neigh)), b)


def edge_conv_forward(h: Tensor, structure: GraphStructure, w_theta: Tensor, b: Tensor) -> Tensor:
    """
    h'_i = max_j [concat(h_i, h_j - h_i) W_theta + b] over the static neighbors
    of i, elementwise. An isolated node yields concat(h_i, 0) W_theta + b.
    """
    _check_nodes("edge_conv", h, structure)
    if w_theta.shape[0] != 2 * h.shape[1]:
        raise DimensionError.for_shapes("edge_conv", h.shape, w_theta.shape)
    center = gather_rows(h, structure.centers)
    neighbor = gather_rows(h, structure.neighbors)
    messages = matmul(concat_cols([center, sub(neighbor, center)]), w_theta)
    # max(x + b) == max(x) + b, bias added once per node
    return add(segment_max(messages, structure.indptr), b)


def node_linear_forward(h: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Y = W H + b: every feature column x_f maps to W x_f + b."""
    if h.shape[0] != w.shape[1]:
        raise TopologyMismatchError(w.shape[1], h.shape[0])
    return add(matmul(w, h), b)


def pointnet_forward(h: Tensor, stages: Dict[str, Tuple[Tensor, Tensor]]) -> Tensor:
    """
    Shared MLP 5 -> 50 -> 100, global max pool, concat to every point,
    shared MLP 200 -> 50 -> 1, ReLU after every stage.

    Args:
        stages: (W, b) of "mlp1", "mlp2", "head1" and "head2"
    """
    local = relu(dense_forward(h, *stages["mlp1"]))
    local = relu(dense_forward(local, *stages["mlp2"]))
    pooled = row_max(local)
    broadcast = gather_rows(pooled, np.zeros(h.shape[0], dtype=np.int64))
    combined = concat_cols([local, broadcast])
    out = relu(dense_forward(combined, *stages["head1"]))
    return relu(dense_forward(out, *stages["head2"]))


class Layer(ABC):
    """Named parameter container.

    Weights are drawn Glorot-uniform with bound sqrt(6 / (fan_in + fan_out));
    biases start at zero.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        self.params: Dict[str, Tensor] = {}
        self._fans: Dict[str, Tuple[int, int]] = {}

    def _weight(self, key: str, shape: Tuple[int, int], fan_in: Optional[int] = None) -> Tensor:
        tensor = Tensor(np.zeros(shape), requires_grad=True, name=f"{self.name}.{key}")
        self.params[key] = tensor
        self._fans[key] = (fan_in if fan_in is not None else shape[0], shape[1])
        return tensor

    def _bias(self, key: str, shape: Tuple[int, int]) -> Tensor:
        tensor = Tensor(np.zeros(shape), requires_grad=True, name=f"{self.name}.{key}")
        self.params[key] = tensor
        return tensor

    def init_params(self, rng: np.random.Generator) -> None:
        for key, tensor in self.params.items():
            if key in self._fans:
                fan_in, fan_out = self._fans[key]
                bound = np.sqrt(6.0 / (fan_in + fan_out))
                tensor.values[...] = rng.uniform(-bound, bound, size=tensor.shape)
            else:
                tensor.values[...] = 0.0

    def glorot_bound(self, key: str) -> float:
        fan_in, fan_out = self._fans[key]
        return float(np.sqrt(6.0 / (fan_in + fan_out)))

    @abstractmethod
    def __call__(self, h: Tensor, structure: GraphStructure) -> Tensor:
        ...


class Dense(Layer):
    def __init__(self, name: str, in_width: int, out_width: int) -> None:
        super().__init__(name)
        self.weight = self._weight("weight", (in_width, out_width))
        self.bias = self._bias("bias", (1, out_width))

    def __call__(self, h: Tensor, structure: Optional[GraphStructure] = None) -> Tensor:
        return dense_forward(h, self.weight, self.bias)


class GraphConv(Layer):
    def __init__(self, name: str, in_width: int, out_width: int) -> None:
        super().__init__(name)
        self.weight = self._weight("weight", (in_width, out_width))
        self.bias = self._bias("bias", (1, out_width))

    def __call__(self, h: Tensor, structure: GraphStructure) -> Tensor:
        return graph_conv_forward(h, structure, self.weight, self.bias)


class SAGEConv(Layer):
    def __init__(self, name: str, in_width: int, out_width: int) -> None:
        super().__init__(name)
        self.weight_self = self._weight("weight_self", (in_width, out_width))
        self.weight_neigh = self._weight("weight_neigh", (in_width, out_width))
        self.bias = self._bias("bias", (1, out_width))

    def __call__(self, h: Tensor, structure: GraphStructure) -> Tensor:
        return sage_conv_forward(h, structure, self.weight_self, self.weight_neigh, self.bias)


class EdgeConv(Layer):
    def __init__(self, name: str, in_width: int, out_width: int) -> None:
        super().__init__(name)
        self.weight = self._weight("weight", (2 * in_width, out_width), fan_in=2 * in_width)
        self.bias = self._bias("bias", (1, out_width))

    def __call__(self, h: Tensor, structure: GraphStructure) -> Tensor:
        return edge_conv_forward(h, structure, self.weight, self.bias)


class NodeLinear(Layer):
    """Linear map across the N nodes of one die topology."""

    def __init__(self, name: str, node_count: int) -> None:
        super().__init__(name)
        self.node_count = node_count
        self.weight = self._weight("weight", (node_count, node_count))
        self.bias = self._bias("bias", (node_count, 1))

    def __call__(self, h: Tensor, structure: Optional[GraphStructure] = None) -> Tensor:
        return node_linear_forward(h, self.weight, self.bias)
