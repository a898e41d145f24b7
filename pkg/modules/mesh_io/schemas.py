# external imports
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from pydantic import BaseModel, field_validator

# internal imports
from core.exceptions import MeshValidationError


def _check_field_name(name: str) -> None:
    if not name or any(ch.isspace() for ch in name):
        raise MeshValidationError(f"field name {name!r} must be a single non-empty token")


@dataclass(eq=False)
class UnstructuredMesh:
    """
    Tetrahedral FEM output container.

    Attributes:
        points: (N_p, 3) float64 coordinates in meters
        cells: (N_c, 4) int64 point indices, one row per tetrahedron
        cell_fields: scalar arrays of length N_c keyed by field name
        point_fields: scalar arrays of length N_p keyed by field name
    """
    points: np.ndarray
    cells: np.ndarray
    cell_fields: Dict[str, np.ndarray] = field(default_factory=dict)
    point_fields: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        self.cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, 4)
        self.cell_fields = {k: np.asarray(v, dtype=np.float64).reshape(-1) for k, v in self.cell_fields.items()}
        self.point_fields = {k: np.asarray(v, dtype=np.float64).reshape(-1) for k, v in self.point_fields.items()}

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    def validate(self) -> "UnstructuredMesh":
        """
        Check every mesh invariant and return self.

        Raises:
            MeshValidationError: on an out-of-range index, a repeated index within
                a cell, or a field whose length does not match its association
        """
        if self.n_cells:
            low, high = int(self.cells.min()), int(self.cells.max())
            if low < 0 or high >= self.n_points:
                bad = low if low < 0 else high
                raise MeshValidationError(
                    f"cell references point index {bad}, valid range is [0, {self.n_points})"
                )
            ordered = np.sort(self.cells, axis=1)
            repeated = np.flatnonzero((ordered[:, 1:] == ordered[:, :-1]).any(axis=1))
            if repeated.size:
                raise MeshValidationError(
                    f"cell {int(repeated[0])} repeats a point index: {self.cells[repeated[0]].tolist()}"
                )

        for name, values in self.cell_fields.items():
            _check_field_name(name)
            if values.shape[0] != self.n_cells:
                raise MeshValidationError(
                    f"cell field '{name}' has {values.shape[0]} values for {self.n_cells} cells"
                )
        for name, values in self.point_fields.items():
            _check_field_name(name)
            if values.shape[0] != self.n_points:
                raise MeshValidationError(
                    f"point field '{name}' has {values.shape[0]} values for {self.n_points} points"
                )
        return self

    def copy(self) -> "UnstructuredMesh":
        return UnstructuredMesh(
            points=self.points.copy(),
            cells=self.cells.copy(),
            cell_fields={k: v.copy() for k, v in self.cell_fields.items()},
            point_fields={k: v.copy() for k, v in self.point_fields.items()},
        )

    def __eq__(self, other: object) -> bool:
        # Field-for-field, bit-exact (NaN compares equal to NaN)
        if not isinstance(other, UnstructuredMesh):
            return NotImplemented
        if self.cell_fields.keys() != other.cell_fields.keys():
            return False
        if self.point_fields.keys() != other.point_fields.keys():
            return False
        if not np.array_equal(self.points, other.points, equal_nan=True):
            return False
        if not np.array_equal(self.cells, other.cells):
            return False
        for name, values in self.cell_fields.items():
            if not np.array_equal(values, other.cell_fields[name], equal_nan=True):
                return False
        for name, values in self.point_fields.items():
            if not np.array_equal(values, other.point_fields[name], equal_nan=True):
                return False
        return True


class MeshMetadata(BaseModel):
    """
    Per-simulation initial conditions, carried next to the mesh in the manifest.
    """
    temperature: float
    friction_coefficient: float
    source_id: str = ""

    @field_validator('friction_coefficient')
    def validate_friction(cls, v):
        if v < 0:
            raise ValueError(f"Friction coefficient must be non-negative, got {v}")
        return v
