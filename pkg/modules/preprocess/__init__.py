from modules.preprocess.dataset import build_dataset
from modules.preprocess.normalization import apply_normalization, fit_normalization
from modules.preprocess.schemas import (
    BoundaryFaces,
    GraphDataset,
    Normalization,
    Split,
    SurfaceGraph,
    SurfaceTopology,
)
from modules.preprocess.surface import (
    boundary_faces,
    build_graph,
    cell_to_point,
    extract_surface,
    point_cell_incidence,
)

__all__ = [
    "BoundaryFaces",
    "GraphDataset",
    "Normalization",
    "Split",
    "SurfaceGraph",
    "SurfaceTopology",
    "apply_normalization",
    "boundary_faces",
    "build_dataset",
    "build_graph",
    "cell_to_point",
    "extract_surface",
    "fit_normalization",
    "point_cell_incidence",
]
