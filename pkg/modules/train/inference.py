# external imports
from dataclasses import dataclass
from typing import Optional

import numpy as np

# internal imports
from core.constants import WEAR_PRED_FIELD
from core.logger import setup_logger
from modules.autodiff import Mode, Tensor
from modules.mesh_io import MeshMetadata, UnstructuredMesh
from modules.nn import BaseGraphModel, GraphStructure
from modules.preprocess import Normalization, SurfaceGraph, apply_normalization, build_graph
from utils.helper_funcs import Stopwatch

logger = setup_logger(__name__)


@dataclass
class PredictionResult:
    """
    Attributes:
        mesh: copy of the input mesh with the point field "wear_pred"
        graph: surface graph the model ran on (unnormalized features)
        wear: predicted wear per surface node
        inference_ms: eval-mode forward pass only
        total_ms: surface extraction, normalization and forward pass
    """
    mesh: UnstructuredMesh
    graph: SurfaceGraph
    wear: np.ndarray
    inference_ms: float
    total_ms: float


def predict(
    model: BaseGraphModel,
    normalization: Optional[Normalization],
    mesh: UnstructuredMesh,
    meta: MeshMetadata,
) -> PredictionResult:
    """
    Predict the wear field of one simulation.

    Surface points receive the model output; every other point gets 0.

    Raises:
        TopologyMismatchError: the surface does not fit a topology-bound model
    """
    with Stopwatch() as total:
        graph = build_graph(mesh, meta, wear_field=None)
        features = apply_normalization(graph, normalization) if normalization is not None else graph
        structure = GraphStructure.from_graph(graph)
        model.check_topology(structure)
        with Stopwatch() as forward:
            out = model.forward(Tensor(features.features), structure, mode=Mode.EVAL)
        wear = out.values[:, 0].copy()

        result_mesh = mesh.copy()
        values = np.zeros(mesh.n_points)
        values[graph.node_ids] = wear
        result_mesh.point_fields[WEAR_PRED_FIELD] = values

    logger.info(
        f"Predicted wear on {graph.n_nodes} surface nodes in {forward.milliseconds:.1f} ms "
        f"({total.milliseconds:.1f} ms including preprocessing)"
    )
    return PredictionResult(
        mesh=result_mesh,
        graph=graph,
        wear=wear,
        inference_ms=forward.milliseconds,
        total_ms=total.milliseconds,
    )
