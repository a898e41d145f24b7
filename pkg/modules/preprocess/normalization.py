# external imports
from typing import Sequence

import numpy as np

# internal imports
from core.exceptions import DimensionError, InvalidParameterError
from modules.preprocess.schemas import Normalization, SurfaceGraph

# Relative spread below which a column counts as constant
_CONSTANT_TOLERANCE = 1e-12


def fit_normalization(graphs: Sequence[SurfaceGraph]) -> Normalization:
    """
    Fit per-column standardization on the training graphs.

    Every feature column gets shift = mean and scale = population standard
    deviation over all training nodes; constant columns keep scale 1. Wear
    targets are left alone so predictions stay in N/m.

    Raises:
        InvalidParameterError: no training graph was given
    """
    if not graphs:
        raise InvalidParameterError("cannot fit a normalization on an empty training set")
    stacked = np.vstack([g.features for g in graphs])
    shift = stacked.mean(axis=0)
    spread = stacked.std(axis=0)
    constant = spread <= _CONSTANT_TOLERANCE * np.maximum(1.0, np.abs(shift))
    scale = np.where(constant, 1.0, spread)
    return Normalization(shift=shift, scale=scale)


def apply_normalization(graph: SurfaceGraph, normalization: Normalization) -> SurfaceGraph:
    """Return a copy of the graph with standardized features."""
    if graph.features.shape[1] != normalization.shift.shape[0]:
        raise DimensionError.for_shapes(
            "apply_normalization", graph.features.shape, normalization.shift.shape
        )
    return graph.with_features((graph.features - normalization.shift) / normalization.scale)
