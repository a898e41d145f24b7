# external imports
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, NamedTuple, Optional

import numpy as np

# internal imports
from core.constants import FEATURE_COLUMNS, N_FEATURES
from core.exceptions import InvalidParameterError, MeshValidationError, TopologyMismatchError


class Split(Enum):
    """Dataset partition a graph belongs to."""
    TRAIN = "train"
    VAL = "val"
    TEST = "test"

    def __str__(self) -> str:
        return self.value


class SurfaceTopology(NamedTuple):
    """External surface of a tetrahedral mesh.

    Attributes:
        node_ids: sorted original point indices of the surface nodes, length N
        edges: (E, 2) undirected edges reindexed to [0, N), i < j, sorted
        faces: (F, 3) boundary triangles in original point indices
    """
    node_ids: np.ndarray
    edges: np.ndarray
    faces: np.ndarray


class BoundaryFaces(NamedTuple):
    """Faces occurring in exactly one tetrahedron, with their owning cell and
    the owning cell's vertex that is not on the face."""
    faces: np.ndarray
    owners: np.ndarray
    opposite: np.ndarray


@dataclass(eq=False)
class SurfaceGraph:
    """
    Surface graph G(V, E) of one simulation.

    Attributes:
        node_ids: original mesh point index of each node, length N
        positions: (N, 3) coordinates in meters
        edges: (E, 2) undirected index pairs, i < j
        features: (N, 5) node features (x, y, z, temperature, friction coefficient)
        wear: length-N target in N/m, None on prediction inputs
    """
    node_ids: np.ndarray
    positions: np.ndarray
    edges: np.ndarray
    features: np.ndarray
    wear: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.node_ids = np.asarray(self.node_ids, dtype=np.int64).reshape(-1)
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.features = np.asarray(self.features, dtype=np.float64).reshape(-1, N_FEATURES)
        if self.wear is not None:
            self.wear = np.asarray(self.wear, dtype=np.float64).reshape(-1)

    @property
    def n_nodes(self) -> int:
        return int(self.node_ids.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def validate(self) -> "SurfaceGraph":
        """
        Check the SurfaceGraph invariants and return self.

        Raises:
            MeshValidationError: on self-loops, duplicate edges, isolated nodes,
                negative wear, non-constant parameter columns or inconsistent lengths
        """
        n = self.n_nodes
        if self.positions.shape[0] != n or self.features.shape[0] != n:
            raise MeshValidationError(
                f"graph has {n} nodes but {self.positions.shape[0]} positions and {self.features.shape[0]} feature rows"
            )
        if self.edges.size:
            if self.edges.min() < 0 or self.edges.max() >= n:
                raise MeshValidationError(f"edge index outside [0, {n})")
            if (self.edges[:, 0] >= self.edges[:, 1]).any():
                raise MeshValidationError("edges must be stored as (i, j) with i < j; self-loops are not allowed")
            if np.unique(self.edges, axis=0).shape[0] != self.n_edges:
                raise MeshValidationError("duplicate edge in surface graph")
        degree = np.bincount(self.edges.reshape(-1), minlength=n)
        isolated = np.flatnonzero(degree == 0)
        if isolated.size:
            raise MeshValidationError(f"surface node {int(isolated[0])} has no edge")
        if self.wear is not None:
            if self.wear.shape[0] != n:
                raise MeshValidationError(f"wear has {self.wear.shape[0]} values for {n} nodes")
            if (self.wear < 0).any():
                raise MeshValidationError("wear must be non-negative")
        if n and (self.features[:, 3:] != self.features[0, 3:]).any():
            raise MeshValidationError("temperature and friction columns must be constant within one graph")
        return self

    def with_features(self, features: np.ndarray) -> "SurfaceGraph":
        return replace(self, features=features)

    def same_topology(self, other: "SurfaceGraph") -> bool:
        return self.n_nodes == other.n_nodes and np.array_equal(self.edges, other.edges)


@dataclass
class Normalization:
    """Per-column affine feature transform: (x - shift) / scale."""
    shift: np.ndarray
    scale: np.ndarray

    def __post_init__(self) -> None:
        self.shift = np.asarray(self.shift, dtype=np.float64).reshape(-1)
        self.scale = np.asarray(self.scale, dtype=np.float64).reshape(-1)
        if self.shift.shape != self.scale.shape:
            raise InvalidParameterError("normalization shift and scale must have the same length")
        if not (self.scale > 0).all():
            raise InvalidParameterError("normalization scale values must be strictly positive")

    @classmethod
    def identity(cls, width: int = N_FEATURES) -> "Normalization":
        return cls(shift=np.zeros(width), scale=np.ones(width))

    def to_dict(self) -> Dict[str, List[float]]:
        return {
            "columns": list(FEATURE_COLUMNS[:self.shift.shape[0]]),
            "shift": [float(v) for v in self.shift],
            "scale": [float(v) for v in self.scale],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, List[float]]) -> "Normalization":
        return cls(shift=np.array(payload["shift"]), scale=np.array(payload["scale"]))


@dataclass
class GraphDataset:
    """
    Topology-identical surface graphs of one die across many initial conditions.

    Attributes:
        graphs: surface graphs sharing node count and edge set
        source_ids: identifier of each graph (manifest source_id)
        splits: partition of each graph
        normalization: feature transform fitted on the training split
    """
    graphs: List[SurfaceGraph]
    source_ids: List[str] = field(default_factory=list)
    splits: List[Split] = field(default_factory=list)
    normalization: Optional[Normalization] = None

    def __post_init__(self) -> None:
        if not self.source_ids:
            self.source_ids = [f"graph_{i:03d}" for i in range(len(self.graphs))]
        if not self.splits:
            self.splits = [Split.TRAIN] * len(self.graphs)
        self.splits = [Split(s) for s in self.splits]
        if not (len(self.graphs) == len(self.source_ids) == len(self.splits)):
            raise InvalidParameterError("graphs, source_ids and splits must have equal lengths")
        self.validate_topology()

    @property
    def n_nodes(self) -> Optional[int]:
        return self.graphs[0].n_nodes if self.graphs else None

    def validate_topology(self) -> None:
        if not self.graphs:
            return
        reference = self.graphs[0]
        for graph, source_id in zip(self.graphs[1:], self.source_ids[1:]):
            if graph.n_nodes != reference.n_nodes:
                raise TopologyMismatchError(reference.n_nodes, graph.n_nodes, context=source_id)
            if not np.array_equal(graph.edges, reference.edges):
                raise MeshValidationError(
                    f"{source_id}: edge set differs from '{self.source_ids[0]}' although node counts match"
                )

    def indices(self, split: Split) -> List[int]:
        return [i for i, s in enumerate(self.splits) if s == split]

    def subset(self, split: Split) -> "GraphDataset":
        chosen = self.indices(split)
        return GraphDataset(
            graphs=[self.graphs[i] for i in chosen],
            source_ids=[self.source_ids[i] for i in chosen],
            splits=[split] * len(chosen),
            normalization=self.normalization,
        )

    def __len__(self) -> int:
        return len(self.graphs)
