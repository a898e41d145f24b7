# external imports
from typing import Optional

import numpy as np

# internal imports
from modules.autodiff import Mode, Tensor, dropout, relu
from modules.nn.base import BaseGraphModel
from modules.nn.graph import GraphStructure
from modules.nn.layers import Dense, EdgeConv, GraphConv, NodeLinear, SAGEConv, pointnet_forward
from modules.nn.schemas import DropoutPlacement, ModelSpec


class GraphConvBaseline(BaseGraphModel):
    """Five graph convolutions 5 -> 50 -> 100 -> 100 -> 50 -> 1, ReLU after each.

    The middle 100 -> 100 convolution stands in for the fully connected layer
    so the stack keeps five layers.
    """

    def __init__(self, spec: ModelSpec) -> None:
        super().__init__(spec)
        w = spec.widths
        ladder = (w[0], w[1], w[2], w[2], w[3], w[4])
        self.layers = [
            GraphConv(f"conv{i + 1}", ladder[i], ladder[i + 1]) for i in range(len(ladder) - 1)
        ]

    def forward(self, features, structure, mode=Mode.EVAL, rng=None):
        h = features
        for layer in self.layers:
            h = relu(layer(h, structure))
        return h


class LinearConvModel(BaseGraphModel):
    """
    conv(5->50) ReLU, conv(50->100) ReLU, Dropout, NodeLinear(N->N) ReLU,
    Dropout, conv(100->50) ReLU, conv(50->1) ReLU.

    The second dropout is skipped with DropoutPlacement.BEFORE.
    """
    conv_class = EdgeConv

    def __init__(self, spec: ModelSpec) -> None:
        super().__init__(spec)
        w = spec.widths
        self.conv1 = self.conv_class("conv1", w[0], w[1])
        self.conv2 = self.conv_class("conv2", w[1], w[2])
        self.linear = NodeLinear("linear", spec.node_count)
        self.conv3 = self.conv_class("conv3", w[2], w[3])
        self.conv4 = self.conv_class("conv4", w[3], w[4])
        self.layers = [self.conv1, self.conv2, self.linear, self.conv3, self.conv4]

    def forward(
        self,
        features: Tensor,
        structure: GraphStructure,
        mode: Mode = Mode.EVAL,
        rng: Optional[np.random.Generator] = None,
    ) -> Tensor:
        self.check_topology(structure)
        p = self.spec.dropout_p
        h = relu(self.conv1(features, structure))
        h = relu(self.conv2(h, structure))
        h = dropout(h, p, mode, rng)
        h = relu(self.linear(h))
        if self.spec.dropout_placement is DropoutPlacement.BOTH:
            h = dropout(h, p, mode, rng)
        h = relu(self.conv3(h, structure))
        return relu(self.conv4(h, structure))


class EdgeConvLinear(LinearConvModel):
    conv_class = EdgeConv


class SageConvLinear(LinearConvModel):
    conv_class = SAGEConv


class PointNetBaseline(BaseGraphModel):
    """Per-point shared MLP with a max-pooled global feature; ignores edges."""

    def __init__(self, spec: ModelSpec) -> None:
        super().__init__(spec)
        w = spec.widths
        self.mlp1 = Dense("mlp1", w[0], w[1])
        self.mlp2 = Dense("mlp2", w[1], w[2])
        self.head1 = Dense("head1", 2 * w[2], w[3])
        self.head2 = Dense("head2", w[3], w[4])
        self.layers = [self.mlp1, self.mlp2, self.head1, self.head2]

    def forward(self, features, structure, mode=Mode.EVAL, rng=None):
        stages = {layer.name: (layer.weight, layer.bias) for layer in self.layers}
        return pointnet_forward(features, stages)
