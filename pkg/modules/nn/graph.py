"""
Precomputed sparse incidence structure shared by every layer of a model.

Layers never build dense N x N adjacency; they multiply by the CSR matrices
held here or gather over the sorted directed pair list.
"""

# external imports
from dataclasses import dataclass

import numpy as np
from scipy import sparse

# internal imports
from core.exceptions import MeshValidationError
from modules.preprocess.schemas import SurfaceGraph


@dataclass(frozen=True)
class GraphStructure:
    """
    Attributes:
        n_nodes: node count N
        gcn: D~^-1/2 (A + I) D~^-1/2 as CSR
        mean: row-normalized adjacency; rows of isolated nodes are zero
        centers: center node of each directed pair, sorted ascending
        neighbors: neighbor node of each directed pair
        indptr: pairs of node i occupy [indptr[i], indptr[i+1])
        isolated: boolean mask of nodes without neighbors
    """
    n_nodes: int
    gcn: sparse.csr_matrix
    mean: sparse.csr_matrix
    centers: np.ndarray
    neighbors: np.ndarray
    indptr: np.ndarray
    isolated: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int, edges: np.ndarray) -> "GraphStructure":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n_nodes):
            raise MeshValidationError(f"edge index outside [0, {n_nodes})")
        if (edges[:, 0] == edges[:, 1]).any():
            raise MeshValidationError("self-loops are added by the layers, not stored as edges")

        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        adjacency = sparse.csr_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(n_nodes, n_nodes)
        )
        # Repeated undirected edges collapse to one neighbor
        adjacency.sum_duplicates()
        adjacency.data[:] = 1.0

        degree = np.asarray(adjacency.sum(axis=1)).reshape(-1)
        with_loops = adjacency + sparse.identity(n_nodes, format="csr")
        inv_sqrt = sparse.diags(1.0 / np.sqrt(degree + 1.0))
        gcn = (inv_sqrt @ with_loops @ inv_sqrt).tocsr()

        inv_degree = np.divide(1.0, degree, out=np.zeros_like(degree), where=degree > 0)
        mean = (sparse.diags(inv_degree) @ adjacency).tocsr()

        coo = adjacency.tocoo()
        centers, neighbors = coo.row.astype(np.int64), coo.col.astype(np.int64)
        isolated = degree == 0
        # Isolated nodes pair with themselves so the difference term is zero
        lonely = np.flatnonzero(isolated)
        centers = np.concatenate([centers, lonely])
        neighbors = np.concatenate([neighbors, lonely])
        order = np.lexsort((neighbors, centers))
        centers, neighbors = centers[order], neighbors[order]
        counts = np.bincount(centers, minlength=n_nodes)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

        return cls(
            n_nodes=int(n_nodes),
            gcn=gcn,
            mean=mean,
            centers=centers,
            neighbors=neighbors,
            indptr=indptr,
            isolated=isolated,
        )

    @classmethod
    def from_graph(cls, graph: SurfaceGraph) -> "GraphStructure":
        return cls.from_edges(graph.n_nodes, graph.edges)
