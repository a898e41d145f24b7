# external imports
from typing import Optional

import numpy as np

# internal imports
from core.constants import DEFAULT_WEAR_FIELD, MAX_WEAR
from core.exceptions import InvalidParameterError
from modules.mesh_io.schemas import UnstructuredMesh
from modules.preprocess import boundary_faces
from modules.synth.schemas import WearLaw

# Alignments below this count as tangential
_ALIGNMENT_FLOOR = 1e-9


def dominant_face_normals(mesh: UnstructuredMesh) -> np.ndarray:
    """
    Outward unit normal of each cell's largest boundary face, zero rows for
    cells without a boundary face.
    """
    bounds = boundary_faces(mesh.cells)
    normals = np.zeros((mesh.n_cells, 3))
    if bounds.faces.shape[0] == 0:
        return normals

    a, b, c = (mesh.points[bounds.faces[:, i]] for i in range(3))
    cross = np.cross(b - a, c - a)
    area = 0.5 * np.linalg.norm(cross, axis=1)
    inward = np.einsum("ij,ij->i", cross, mesh.points[bounds.opposite] - a) > 0
    cross[inward] *= -1.0
    unit = np.divide(cross, (2.0 * area)[:, None], out=np.zeros_like(cross), where=area[:, None] > 0)

    # Largest face first within each owner, ties keep face order
    order = np.lexsort((-area, bounds.owners))
    owners_sorted = bounds.owners[order]
    _, first = np.unique(owners_sorted, return_index=True)
    chosen = order[first]
    normals[bounds.owners[chosen]] = unit[chosen]
    return normals


def apply_wear_law(
    mesh: UnstructuredMesh,
    temperature: float,
    friction_coefficient: float,
    law: Optional[WearLaw] = None,
    field: str = DEFAULT_WEAR_FIELD,
) -> UnstructuredMesh:
    """
    Copy of `mesh` with the analytic cell wear field

        wear_c = C * mu * (T / T0) * max(0, n_c . d)^k * 2000

    where n_c is the outward normal of the cell's dominant boundary face and
    interior cells get 0. Values are clipped to [0, 2000] N/m.
    """
    law = law or WearLaw()
    if friction_coefficient < 0:
        raise InvalidParameterError(f"friction coefficient must be non-negative, got {friction_coefficient}")
    alignment = dominant_face_normals(mesh) @ law.direction
    alignment = np.where(alignment > _ALIGNMENT_FLOOR, alignment, 0.0)
    wear = (
        friction_coefficient
        * law.coefficient
        * (temperature / law.reference_temperature)
        * alignment ** law.exponent
        * MAX_WEAR
    )
    result = mesh.copy()
    result.cell_fields[field] = np.clip(wear, 0.0, MAX_WEAR)
    return result
