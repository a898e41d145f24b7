"""
Surface Module

Turns a tetrahedral FEM mesh into the graph the models consume: cell data is
moved to the points by plain averaging, the external surface is found as the
set of faces owned by a single tetrahedron, and the surface triangles' edges
become the adjacency list.
"""

# external imports
from typing import Optional, Union

import numpy as np
from scipy import sparse

# internal imports
from core.exceptions import MeshValidationError, NonManifoldError, UnknownFieldError
from core.logger import setup_logger
from modules.mesh_io.schemas import MeshMetadata, UnstructuredMesh
from modules.preprocess.schemas import BoundaryFaces, SurfaceGraph, SurfaceTopology

logger = setup_logger(__name__)

# Face k of a tetrahedron omits local vertex k
_FACE_LOCAL = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
_FACE_EDGES = np.array([[0, 1], [0, 2], [1, 2]])


def point_cell_incidence(mesh: UnstructuredMesh) -> sparse.csr_matrix:
    """n_points x n_cells 0/1 matrix, entry (p, c) set when cell c contains point p."""
    n_cells = mesh.n_cells
    rows = mesh.cells.reshape(-1)
    cols = np.repeat(np.arange(n_cells), 4)
    return sparse.csr_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(mesh.n_points, n_cells)
    )


def cell_to_point(mesh: UnstructuredMesh, field: str) -> np.ndarray:
    """
    Average a cell field onto the points: out[p] is the arithmetic mean of the
    field over every cell containing p.

    Raises:
        UnknownFieldError: the field is not a cell field of the mesh
        MeshValidationError: a point belongs to no cell
    """
    if field not in mesh.cell_fields:
        raise UnknownFieldError(
            f"unknown cell field '{field}'; available: {sorted(mesh.cell_fields) or 'none'}"
        )
    values = mesh.cell_fields[field]
    incidence = point_cell_incidence(mesh)
    counts = np.asarray(incidence.sum(axis=1)).ravel()
    orphans = np.flatnonzero(counts == 0)
    if orphans.size:
        raise MeshValidationError(
            f"point {int(orphans[0])} belongs to no cell ({orphans.size} such points)"
        )
    return (incidence @ values) / counts


def boundary_faces(cells: np.ndarray) -> BoundaryFaces:
    """
    Find the faces that occur in exactly one tetrahedron.

    Returns:
        BoundaryFaces with vertex-sorted faces (lexicographic order), the index of
        the owning cell, and the owning cell's fourth vertex

    Raises:
        NonManifoldError: a face occurs in more than two tetrahedra
    """
    cells = np.asarray(cells, dtype=np.int64).reshape(-1, 4)
    if cells.shape[0] == 0:
        empty = np.empty((0,), dtype=np.int64)
        return BoundaryFaces(np.empty((0, 3), dtype=np.int64), empty, empty)

    # Row 4*c + k holds face k of cell c
    faces = np.sort(cells[:, _FACE_LOCAL].reshape(-1, 3), axis=1)
    unique, first, counts = np.unique(faces, axis=0, return_index=True, return_counts=True)

    crowded = np.flatnonzero(counts > 2)
    if crowded.size:
        face = unique[crowded[0]]
        raise NonManifoldError(
            f"face {face.tolist()} is shared by {int(counts[crowded[0]])} tetrahedra"
        )

    rows = first[counts == 1]
    owners = rows // 4
    opposite = cells[owners, rows % 4]
    return BoundaryFaces(unique[counts == 1], owners, opposite)


def extract_surface(mesh: UnstructuredMesh) -> SurfaceTopology:
    """
    External surface nodes and edges of a tetrahedral mesh.

    Surface nodes are the vertices of the boundary faces; surface edges are the
    deduplicated edges of the boundary faces, reindexed to [0, N) in the order
    of the sorted original point indices.
    """
    bounds = boundary_faces(mesh.cells)
    node_ids = np.unique(bounds.faces)
    # Faces are vertex-sorted, so every pair already has i < j
    pairs = np.unique(bounds.faces[:, _FACE_EDGES].reshape(-1, 2), axis=0)
    edges = np.searchsorted(node_ids, pairs)
    logger.debug(
        f"Surface of {mesh.n_cells} cells: {bounds.faces.shape[0]} faces, "
        f"{node_ids.size} nodes, {edges.shape[0]} edges"
    )
    return SurfaceTopology(node_ids=node_ids, edges=edges, faces=bounds.faces)


def build_graph(
    mesh: UnstructuredMesh,
    meta: Union[MeshMetadata, dict],
    wear_field: Optional[str] = None,
) -> SurfaceGraph:
    """
    Build the surface graph G(V, E) of one simulation.

    Args:
        mesh: Valid tetrahedral mesh
        meta: Initial conditions; temperature and friction fill feature columns 4-5
        wear_field: Cell field averaged onto the surface nodes as the target, if any

    Returns:
        SurfaceGraph satisfying every graph invariant
    """
    if not isinstance(meta, MeshMetadata):
        meta = MeshMetadata(**meta)
    mesh.validate()
    topology = extract_surface(mesh)

    wear = None
    if wear_field is not None:
        wear = cell_to_point(mesh, wear_field)[topology.node_ids]

    positions = mesh.points[topology.node_ids]
    n = positions.shape[0]
    features = np.column_stack([
        positions,
        np.full(n, float(meta.temperature)),
        np.full(n, float(meta.friction_coefficient)),
    ])
    graph = SurfaceGraph(
        node_ids=topology.node_ids,
        positions=positions,
        edges=topology.edges,
        features=features,
        wear=wear,
    )
    return graph.validate()
