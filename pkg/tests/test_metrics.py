# external imports
from dataclasses import replace

import numpy as np
import pytest

# internal imports
from core.exceptions import UndefinedMetricError
from modules.autodiff import Tensor
from modules.metrics import (
    comparison_table,
    dataset_comparison_table,
    dataset_statistics,
    error_percentage,
    evaluate,
    format_table,
    metrics_frame,
    summarize_predictions,
)
from modules.metrics.schemas import EvalSummary
from modules.nn import ModelSpec, Variant, build_model
from modules.preprocess import GraphDataset, Split
from tests.conftest import random_graph


class _ConstantModel:
    """Stands in for a trained model that predicts fixed values."""

    def __init__(self, spec, values):
        self.spec = spec
        self.values = values

    def check_topology(self, structure):
        pass

    def forward(self, features, structure, mode=None, rng=None):
        return Tensor(self.values(features.values).reshape(-1, 1))


def test_error_percentage_values():
    assert error_percentage(8.44626, 90.82) == pytest.approx(9.3, abs=0.01)
    assert error_percentage(5.0, 5.0) == 100.0
    assert error_percentage(0.0, 3.0) == 0.0


def test_error_percentage_scale_invariant():
    sampler = np.random.default_rng(0)
    for mae, mean, factor in sampler.uniform(1e-3, 1e3, size=(1000, 3)):
        assert error_percentage(mae * factor, mean * factor) == pytest.approx(error_percentage(mae, mean))


def test_error_percentage_zero_mean():
    with pytest.raises(UndefinedMetricError):
        error_percentage(1.0, 0.0)


def test_summary_of_perfect_predictor():
    target = np.array([1.0, 2.0, 3.0])
    summary = summarize_predictions(target, target)
    assert summary.mae == 0.0
    assert summary.error_percent == 0.0
    assert summary.max_wear == 3.0


def test_summary_of_zero_predictor():
    target = np.array([1.0, 2.0, 6.0])
    summary = summarize_predictions(np.zeros(3), target)
    assert summary.mae == summary.mean_wear == 3.0
    assert summary.error_percent == 100.0


def test_all_zero_targets_have_no_error_percent():
    summary = summarize_predictions(np.ones(4), np.zeros(4))
    assert summary.error_percent is None
    assert summary.mae == 1.0


def test_evaluate_pools_every_node(rng):
    graphs = [random_graph(rng, n_nodes=8) for _ in range(3)]
    model = _ConstantModel(ModelSpec(variant=Variant.POINTNET_BASELINE), lambda f: np.zeros(f.shape[0]))
    summary = evaluate(model, graphs, source_ids=["a", "b", "c"])
    pooled = np.concatenate([g.wear for g in graphs])
    assert summary.n_nodes == 24
    assert summary.mae == pytest.approx(pooled.mean())
    assert summary.error_percent == pytest.approx(100.0)
    assert [m.source_id for m in summary.per_graph] == ["a", "b", "c"]


def test_single_graph_summary_matches_breakdown(rng):
    graph = random_graph(rng)
    model = build_model(ModelSpec(variant=Variant.GRAPH_CONV_BASELINE))
    summary = evaluate(model, [graph])
    only = summary.per_graph[0]
    assert (summary.mae, summary.mse, summary.error_percent) == (only.mae, only.mse, only.error_percent)


def test_evaluate_needs_targets(rng):
    model = build_model(ModelSpec(variant=Variant.POINTNET_BASELINE))
    with pytest.raises(UndefinedMetricError):
        evaluate(model, [random_graph(rng, wear=False)])
    with pytest.raises(UndefinedMetricError):
        evaluate(model, [])


def test_tables(rng):
    target = np.array([2.0, 4.0])
    summaries = {
        "edgeconv-l": _summary(np.array([2.0, 3.0]), target),
        "graphconv": _summary(np.array([0.0, 0.0]), target),
    }
    frame = metrics_frame(summaries)
    assert list(frame.index) == ["Mean", "Maximum", "MAE", "MSE", "Error%"]
    assert frame.loc["Error%", "graphconv"] == 100.0

    table = comparison_table(summaries, column="test")
    assert list(table.index) == ["Mean", "Maximum", "edgeconv-l", "graphconv"]
    assert table.loc["Mean", "test"] == 3.0
    assert table.loc["edgeconv-l", "test"] == pytest.approx(100.0 / 6.0)
    assert "edgeconv-l" in format_table(table)


def test_dataset_comparison_table_has_one_column_per_die():
    lower_target = np.array([2.0, 4.0])
    upper_target = np.array([1.0, 5.0])
    columns = {
        "cylinder/lower": {
            "edgeconv-l": _summary(np.array([2.0, 3.0]), lower_target),
            "pointnet": _summary(np.array([0.0, 0.0]), lower_target),
        },
        "cylinder/upper": {"edgeconv-l": _summary(np.array([1.0, 5.0]), upper_target)},
    }
    table = dataset_comparison_table(columns)
    assert list(table.columns) == ["cylinder/lower", "cylinder/upper"]
    assert list(table.index) == ["Mean", "Maximum", "edgeconv-l", "pointnet"]
    assert table.loc["Maximum", "cylinder/upper"] == 5.0
    assert table.loc["edgeconv-l", "cylinder/upper"] == 0.0
    assert np.isnan(table.loc["pointnet", "cylinder/upper"])
    assert "undefined" in format_table(table)

    with pytest.raises(UndefinedMetricError):
        dataset_comparison_table({"cylinder/lower": {}})


def _summary(pred, target):
    metrics = summarize_predictions(pred, target)
    return EvalSummary(**metrics.model_dump(exclude={"source_id"}))


def test_dataset_statistics(rng):
    base = random_graph(rng)
    graphs = [replace(base, wear=rng.uniform(0.0, 10.0, size=base.n_nodes)) for _ in range(3)]
    dataset = GraphDataset(graphs=graphs, splits=[Split.TRAIN, Split.TRAIN, Split.TEST])
    stats = dataset_statistics(dataset)
    assert stats["whole"].n_graphs == 3
    assert stats["test"].mean_wear == pytest.approx(graphs[2].wear.mean())
    assert stats["train"].max_wear == max(graphs[0].wear.max(), graphs[1].wear.max())
