from modules.synth.dataset import (
    assign_splits,
    dataset_splits,
    generate_dataset,
    latin_hypercube,
    parameter_grid,
)
from modules.synth.mesh import (
    generate_mesh,
    lattice_cells,
    resolve_lattice,
    surface_node_count,
)
from modules.synth.schemas import Die, Geometry, SynthConfig, WearLaw
from modules.synth.wear import apply_wear_law, dominant_face_normals

__all__ = [
    "Die",
    "Geometry",
    "SynthConfig",
    "WearLaw",
    "apply_wear_law",
    "assign_splits",
    "dataset_splits",
    "dominant_face_normals",
    "generate_dataset",
    "generate_mesh",
    "lattice_cells",
    "latin_hypercube",
    "parameter_grid",
    "resolve_lattice",
    "surface_node_count",
]
