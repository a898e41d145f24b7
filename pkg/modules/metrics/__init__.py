from modules.metrics.handlers import (
    TABLE_ROWS,
    comparison_table,
    dataset_comparison_table,
    dataset_statistics,
    error_percentage,
    evaluate,
    format_table,
    metrics_frame,
    predict_graphs,
    summarize_predictions,
    summary_table,
)
from modules.metrics.schemas import DatasetStatistics, EvalSummary, GraphMetrics

__all__ = [
    "DatasetStatistics",
    "EvalSummary",
    "GraphMetrics",
    "TABLE_ROWS",
    "comparison_table",
    "dataset_comparison_table",
    "dataset_statistics",
    "error_percentage",
    "evaluate",
    "format_table",
    "metrics_frame",
    "predict_graphs",
    "summarize_predictions",
    "summary_table",
]
