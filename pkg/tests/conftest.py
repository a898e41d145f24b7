# external imports
import os

# Keep test runs from writing ./logs/forgewear.log
os.environ.setdefault("FORGEWEAR_LOG_TO_FILE", "false")

import numpy as np
import pytest

# internal imports
from modules.mesh_io import MeshMetadata, UnstructuredMesh
from modules.preprocess import SurfaceGraph


SINGLE_TET_VTK = """# vtk DataFile Version 3.0
single tetrahedron
ASCII
DATASET UNSTRUCTURED_GRID
POINTS 4 double
0 0 0
1 0 0
0 1 0
0 0 1
CELLS 1 5
4 0 1 2 3
CELL_TYPES 1
10
CELL_DATA 1
SCALARS wear double 1
LOOKUP_TABLE default
100.0
"""


@pytest.fixture
def single_tet_text() -> str:
    return SINGLE_TET_VTK


@pytest.fixture
def single_tet() -> UnstructuredMesh:
    return UnstructuredMesh(
        points=[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        cells=[[0, 1, 2, 3]],
        cell_fields={"wear": [100.0]},
    )


@pytest.fixture
def two_tets() -> UnstructuredMesh:
    """Tets {0,1,2,3} (wear 100) and {1,2,3,4} (wear 200) sharing face {1,2,3}."""
    return UnstructuredMesh(
        points=[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
        cells=[[0, 1, 2, 3], [1, 2, 3, 4]],
        cell_fields={"wear": [100.0, 200.0]},
    )


@pytest.fixture
def meta() -> MeshMetadata:
    return MeshMetadata(temperature=1000.0, friction_coefficient=0.3, source_id="sample")


def random_graph(rng: np.random.Generator, n_nodes: int = 10, n_edges: int = 18, wear: bool = True) -> SurfaceGraph:
    """Connected random graph: a spanning path plus random chords."""
    pairs = {(i, i + 1) for i in range(n_nodes - 1)}
    while len(pairs) < n_edges:
        i, j = sorted(rng.choice(n_nodes, size=2, replace=False).tolist())
        pairs.add((i, j))
    edges = np.array(sorted(pairs), dtype=np.int64)
    positions = rng.normal(size=(n_nodes, 3))
    features = np.column_stack([positions, np.full(n_nodes, 1000.0), np.full(n_nodes, 0.3)])
    return SurfaceGraph(
        node_ids=np.arange(n_nodes),
        positions=positions,
        edges=edges,
        features=features,
        wear=rng.uniform(0.0, 5.0, size=n_nodes) if wear else None,
    ).validate()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_graph(rng) -> SurfaceGraph:
    return random_graph(rng)
