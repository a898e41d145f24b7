"""
Evaluation Handlers

Error percentage, whole-dataset evaluation of a trained model and the tables
printed by the command line.
"""

# external imports
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

# internal imports
from core.exceptions import UndefinedMetricError
from core.logger import setup_logger
from modules.autodiff import Mode
from modules.metrics.schemas import DatasetStatistics, EvalSummary, GraphMetrics
from modules.nn import BaseGraphModel, GraphStructure, model_forward
from modules.preprocess import GraphDataset, Normalization, Split, SurfaceGraph, apply_normalization

logger = setup_logger(__name__)

TABLE_ROWS = ("Mean", "Maximum", "MAE", "MSE", "Error%")


def error_percentage(mae: float, mean_wear: float) -> float:
    """
    100 * MAE / mean target wear.

    Raises:
        UndefinedMetricError: mean_wear <= 0 (all-zero target)
    """
    if not mean_wear > 0:
        raise UndefinedMetricError(
            f"error percentage needs a positive mean wear, got {mean_wear}"
        )
    return 100.0 * mae / mean_wear


def summarize_predictions(pred: np.ndarray, target: np.ndarray, source_id: str = "") -> GraphMetrics:
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    if pred.shape != target.shape or target.size == 0:
        raise UndefinedMetricError(
            f"need equally sized non-empty predictions and targets, got {pred.shape} and {target.shape}"
        )
    residual = pred - target
    mae = float(np.mean(np.abs(residual)))
    mean_wear = float(np.mean(target))
    return GraphMetrics(
        source_id=source_id,
        n_nodes=int(target.size),
        mean_wear=mean_wear,
        max_wear=float(np.max(target)),
        mae=mae,
        mse=float(np.mean(residual * residual)),
        error_percent=error_percentage(mae, mean_wear) if mean_wear > 0 else None,
    )


def predict_graphs(
    model: BaseGraphModel,
    graphs: Sequence[SurfaceGraph],
    normalization: Optional[Normalization] = None,
) -> List[np.ndarray]:
    """Eval-mode predictions (length-N arrays) for raw, unnormalized graphs."""
    predictions = []
    structure: Optional[GraphStructure] = None
    previous: Optional[SurfaceGraph] = None
    for graph in graphs:
        if structure is None or not graph.same_topology(previous):
            structure = GraphStructure.from_graph(graph)
        previous = graph
        features = apply_normalization(graph, normalization) if normalization is not None else graph
        out = model_forward(model, features, mode=Mode.EVAL, structure=structure)
        predictions.append(out.values[:, 0].copy())
    return predictions


def evaluate(
    model: BaseGraphModel,
    graphs: Sequence[SurfaceGraph],
    normalization: Optional[Normalization] = None,
    source_ids: Optional[Sequence[str]] = None,
) -> EvalSummary:
    """
    Evaluate a model over every node of every graph.

    Args:
        graphs: Unnormalized graphs with wear targets
        normalization: Feature transform the model was trained with
        source_ids: Labels of the per-graph breakdown

    Raises:
        UndefinedMetricError: no graph, or a graph without targets
        TopologyMismatchError: a graph does not fit a topology-bound model
    """
    if not graphs:
        raise UndefinedMetricError("cannot evaluate on an empty graph list")
    source_ids = list(source_ids) if source_ids is not None else [f"graph_{i:03d}" for i in range(len(graphs))]
    for graph, source_id in zip(graphs, source_ids):
        if graph.wear is None:
            raise UndefinedMetricError(f"{source_id}: graph has no wear targets")

    predictions = predict_graphs(model, graphs, normalization)
    per_graph = [
        summarize_predictions(pred, graph.wear, source_id)
        for pred, graph, source_id in zip(predictions, graphs, source_ids)
    ]
    overall = summarize_predictions(
        np.concatenate(predictions), np.concatenate([g.wear for g in graphs])
    )
    logger.info(
        f"Evaluated {model.spec.variant} on {len(graphs)} graphs: MAE {overall.mae:.6g}, "
        f"Error% {overall.error_percent if overall.error_percent is not None else 'undefined'}"
    )
    return EvalSummary(**overall.model_dump(exclude={"source_id"}), per_graph=per_graph)


def _statistics(name: str, graphs: Sequence[SurfaceGraph]) -> DatasetStatistics:
    labeled = [g.wear for g in graphs if g.wear is not None]
    if not labeled:
        return DatasetStatistics(name=name, n_graphs=len(graphs), n_nodes=0)
    values = np.concatenate(labeled)
    return DatasetStatistics(
        name=name,
        n_graphs=len(graphs),
        n_nodes=int(values.size),
        mean_wear=float(values.mean()),
        max_wear=float(values.max()),
    )


def dataset_statistics(dataset: GraphDataset) -> Dict[str, DatasetStatistics]:
    """Target Mean and Maximum over the train split, the test split and the whole dataset."""
    return {
        "train": _statistics("train", dataset.subset(Split.TRAIN).graphs),
        "test": _statistics("test", dataset.subset(Split.TEST).graphs),
        "whole": _statistics("whole", dataset.graphs),
    }


def metrics_frame(summaries: Mapping[str, EvalSummary]) -> pd.DataFrame:
    """One column per model, rows Mean, Maximum, MAE, MSE, Error%."""
    columns = {
        label: [s.mean_wear, s.max_wear, s.mae, s.mse, s.error_percent]
        for label, s in summaries.items()
    }
    return pd.DataFrame(columns, index=list(TABLE_ROWS), dtype=float)


def summary_table(summary: EvalSummary, label: str = "value") -> pd.DataFrame:
    return metrics_frame({label: summary})


def dataset_comparison_table(columns: Mapping[str, Mapping[str, EvalSummary]]) -> pd.DataFrame:
    """
    Comparison across dies and datasets: one column per evaluated dataset,
    rows Mean and Maximum of that dataset's targets followed by one Error% row
    per model. A model that was not evaluated on a dataset leaves its cell empty.

    Args:
        columns: dataset label -> (model label -> summary on that dataset)
    """
    if not columns or not any(columns.values()):
        raise UndefinedMetricError("comparison table needs at least one summary")
    models: List[str] = []
    for summaries in columns.values():
        models.extend(label for label in summaries if label not in models)

    table = {}
    for column, summaries in columns.items():
        first = next(iter(summaries.values()), None)
        cells = [
            first.mean_wear if first is not None else None,
            first.max_wear if first is not None else None,
        ]
        cells.extend(summaries[m].error_percent if m in summaries else None for m in models)
        table[column] = cells
    return pd.DataFrame(table, index=["Mean", "Maximum"] + models, dtype=float)


def comparison_table(summaries: Mapping[str, EvalSummary], column: str = "Error%") -> pd.DataFrame:
    """
    Single-dataset comparison: rows Mean and Maximum (target statistics, model
    independent) followed by one Error% row per model.
    """
    return dataset_comparison_table({column: summaries})


def format_table(frame: pd.DataFrame) -> str:
    return frame.to_string(float_format=lambda v: f"{v:.4g}", na_rep="undefined")
