"""
Surrogate Model Registry

Maps every Variant to its architecture class so training, prediction and
checkpoint loading build models through one entry point.
"""

# external imports
from typing import Dict, Optional, Type

import numpy as np

# internal imports
from core.logger import setup_logger
from modules.autodiff import Mode, Tensor
from modules.nn.base import BaseGraphModel
from modules.nn.checkpoint import checkpoint_header, load_checkpoint, save_checkpoint
from modules.nn.graph import GraphStructure
from modules.nn.layers import (
    Dense,
    EdgeConv,
    GraphConv,
    Layer,
    NodeLinear,
    SAGEConv,
    edge_conv_forward,
    graph_conv_forward,
    node_linear_forward,
    pointnet_forward,
    sage_conv_forward,
)
from modules.nn.models import EdgeConvLinear, GraphConvBaseline, PointNetBaseline, SageConvLinear
from modules.nn.schemas import VARIANT_ALIASES, DropoutPlacement, ModelSpec, Variant
from modules.preprocess.schemas import SurfaceGraph
from utils.helper_funcs import make_rng

logger = setup_logger(__name__)

_model_map: Dict[Variant, Type[BaseGraphModel]] = {
    Variant.GRAPH_CONV_BASELINE: GraphConvBaseline,
    Variant.POINTNET_BASELINE: PointNetBaseline,
    Variant.EDGE_CONV_LINEAR: EdgeConvLinear,
    Variant.SAGE_CONV_LINEAR: SageConvLinear,
}


def build_model(spec: ModelSpec, rng: Optional[np.random.Generator] = None) -> BaseGraphModel:
    """
    Instantiate the architecture of `spec` with freshly initialized parameters.

    Args:
        spec: Model description
        rng: Generator for the Glorot draws, seeded from spec.seed when omitted

    Raises:
        ValueError: For variants without a registered architecture
    """
    if not isinstance(spec.variant, Variant):
        raise TypeError(f"variant must be a Variant enum member. Received {type(spec.variant)}")
    model_class = _model_map.get(spec.variant)
    if not model_class:
        raise ValueError(f"Unsupported variant: {spec.variant}")

    model = model_class(spec)
    model.init_params(rng if rng is not None else make_rng(spec.seed))
    logger.info(f"Built {spec.variant} with {count_parameters(model)} parameters")
    return model


def init_params(spec: ModelSpec, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Freshly initialized parameter arrays of the architecture of `spec`."""
    model = _model_map[spec.variant](spec)
    model.init_params(rng)
    return model.state_dict()


def count_parameters(model: BaseGraphModel) -> int:
    return int(sum(t.values.size for t in model.parameters().values()))


def model_forward(
    model: BaseGraphModel,
    graph: SurfaceGraph,
    mode: Mode = Mode.EVAL,
    rng: Optional[np.random.Generator] = None,
    structure: Optional[GraphStructure] = None,
) -> Tensor:
    """
    Run the model on a graph whose features are already normalized.

    Args:
        structure: Precomputed incidence of `graph`, rebuilt when omitted

    Returns:
        (N x 1) wear prediction
    """
    structure = structure if structure is not None else GraphStructure.from_graph(graph)
    model.check_topology(structure)
    return model.forward(Tensor(graph.features), structure, mode=mode, rng=rng)


__all__ = [
    "BaseGraphModel",
    "Dense",
    "DropoutPlacement",
    "EdgeConv",
    "EdgeConvLinear",
    "GraphConv",
    "GraphConvBaseline",
    "GraphStructure",
    "Layer",
    "ModelSpec",
    "NodeLinear",
    "PointNetBaseline",
    "SAGEConv",
    "SageConvLinear",
    "VARIANT_ALIASES",
    "Variant",
    "build_model",
    "checkpoint_header",
    "count_parameters",
    "edge_conv_forward",
    "graph_conv_forward",
    "init_params",
    "load_checkpoint",
    "model_forward",
    "node_linear_forward",
    "pointnet_forward",
    "sage_conv_forward",
    "save_checkpoint",
]
