# external imports
from typing import List, Optional

from pydantic import BaseModel, Field


class GraphMetrics(BaseModel):
    """Error statistics over one set of nodes.

    error_percent is None when the targets have zero mean.
    """
    source_id: str = ""
    n_nodes: int
    mean_wear: float
    max_wear: float
    mae: float
    mse: float
    error_percent: Optional[float] = None


class EvalSummary(GraphMetrics):
    """Metrics over all nodes of all evaluated graphs plus the per-graph breakdown."""
    per_graph: List[GraphMetrics] = Field(default_factory=list)


class DatasetStatistics(BaseModel):
    """Mean and Maximum rows of the comparison table for one slice of a dataset."""
    name: str
    n_graphs: int
    n_nodes: int
    mean_wear: Optional[float] = None
    max_wear: Optional[float] = None
