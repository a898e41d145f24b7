"""
Lattice Mesh Module

Builds closed tetrahedral meshes by splitting every cell of a structured
lattice into six tetrahedra and mapping the lattice onto the die solid.

The six tetrahedra of a cell follow the monotone paths from corner (0,0,0) to
corner (1,1,1), one per axis ordering, so neighboring cells agree on the
diagonal of their shared face and the mesh is conforming.
"""

# external imports
from itertools import permutations
from typing import Tuple

import numpy as np

# internal imports
from core.exceptions import InfeasibleResolutionError
from core.logger import setup_logger
from modules.mesh_io.schemas import UnstructuredMesh
from modules.synth.schemas import Die, Geometry, SynthConfig
from utils.helper_funcs import spawn_rngs

logger = setup_logger(__name__)

RESOLUTION_TOLERANCE = 0.2
_MAX_CELLS_PER_AXIS = 512


def _permutation_parity(perm: Tuple[int, ...]) -> int:
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return inversions % 2


def _kuhn_corners() -> np.ndarray:
    """(6, 4, 3) corner offsets of the six tetrahedra of a unit cell, positively oriented."""
    tets = []
    for perm in permutations(range(3)):
        corners = [np.zeros(3, dtype=np.int64)]
        for axis in perm:
            step = corners[-1].copy()
            step[axis] = 1
            corners.append(step)
        if _permutation_parity(perm):
            corners[1], corners[2] = corners[2], corners[1]
        tets.append(corners)
    return np.asarray(tets)


_KUHN = _kuhn_corners()


def surface_node_count(lattice: Tuple[int, int, int]) -> int:
    nx, ny, nz = lattice
    return (nx + 1) * (ny + 1) * (nz + 1) - (nx - 1) * (ny - 1) * (nz - 1)


def lattice_cells(lattice: Tuple[int, int, int]) -> np.ndarray:
    """(6 * nx * ny * nz, 4) tetrahedra over the point grid indexed [i, j, k]."""
    nx, ny, nz = lattice
    index = np.arange((nx + 1) * (ny + 1) * (nz + 1)).reshape(nx + 1, ny + 1, nz + 1)
    tets = np.empty((nx * ny * nz, 6, 4), dtype=np.int64)
    for t, corners in enumerate(_KUHN):
        for v, (di, dj, dk) in enumerate(corners):
            tets[:, t, v] = index[di:di + nx, dj:dj + ny, dk:dk + nz].reshape(-1)
    return tets.reshape(-1, 4)


def _axis_ratios(config: SynthConfig) -> np.ndarray:
    if config.geometry is Geometry.CYLINDER:
        sides = np.array([2 * config.radius, 2 * config.radius, config.height])
    elif config.geometry is Geometry.CYLINDRICAL_SECTOR:
        mean_arc = 0.5 * (config.radius + config.inner_radius) * config.sector_angle
        sides = np.array([config.radius - config.inner_radius, mean_arc, config.height])
    else:
        sides = np.asarray(config.box_size, dtype=np.float64)
    return sides / sides.max()


def resolve_lattice(config: SynthConfig) -> Tuple[int, int, int]:
    """
    Cells per axis: the explicit lattice, or the lattice whose surface node
    count is closest to the target while keeping the solid's proportions.

    Raises:
        InfeasibleResolutionError: no lattice lands within 20% of the target
    """
    if config.lattice is not None:
        return tuple(int(n) for n in config.lattice)

    target = config.target_surface_nodes
    ratios = _axis_ratios(config)
    best, best_gap = None, None
    for n in range(1, _MAX_CELLS_PER_AXIS + 1):
        lattice = tuple(int(max(1, round(n * r))) for r in ratios)
        gap = abs(surface_node_count(lattice) - target)
        if best_gap is None or gap < best_gap:
            best, best_gap = lattice, gap
        if surface_node_count(lattice) > target:
            break
    if best_gap > RESOLUTION_TOLERANCE * target:
        raise InfeasibleResolutionError(
            f"no {config.geometry} lattice has {target} surface nodes within "
            f"{RESOLUTION_TOLERANCE:.0%}; closest is {best} with {surface_node_count(best)}"
        )
    return best


def _lattice_parameters(lattice: Tuple[int, int, int], jitter: float, rng: np.random.Generator) -> np.ndarray:
    """Point parameters (s, t, w) in [-1, 1] x [-1, 1] x [0, 1], interior points jittered."""
    nx, ny, nz = lattice
    s, t, w = np.meshgrid(
        np.linspace(-1.0, 1.0, nx + 1),
        np.linspace(-1.0, 1.0, ny + 1),
        np.linspace(0.0, 1.0, nz + 1),
        indexing="ij",
    )
    params = np.column_stack([s.reshape(-1), t.reshape(-1), w.reshape(-1)])
    if jitter > 0:
        i, j, k = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), np.arange(nz + 1), indexing="ij")
        interior = (
            (i > 0) & (i < nx) & (j > 0) & (j < ny) & (k > 0) & (k < nz)
        ).reshape(-1)
        spacing = np.array([2.0 / nx, 2.0 / ny, 1.0 / nz])
        offsets = rng.uniform(-jitter, jitter, size=(int(interior.sum()), 3)) * spacing
        params[interior] += offsets
    return params


def _map_to_solid(params: np.ndarray, config: SynthConfig, crown: float) -> np.ndarray:
    s, t, w = params[:, 0], params[:, 1], params[:, 2]
    if config.geometry is Geometry.CYLINDER:
        # Square-to-disk map; the lattice boundary lands on the circle
        x = s * np.sqrt(1.0 - 0.5 * t * t)
        y = t * np.sqrt(1.0 - 0.5 * s * s)
        bump = np.clip(1.0 - (x * x + y * y), 0.0, 1.0)
        x, y = config.radius * x, config.radius * y
        height = config.height
    elif config.geometry is Geometry.CYLINDRICAL_SECTOR:
        r = config.inner_radius + (config.radius - config.inner_radius) * 0.5 * (s + 1.0)
        theta = config.sector_angle * 0.5 * (t + 1.0)
        x, y = r * np.cos(theta), r * np.sin(theta)
        bump = (1.0 - s * s) * (1.0 - t * t)
        height = config.height
    else:
        x = config.box_size[0] * 0.5 * (s + 1.0)
        y = config.box_size[1] * 0.5 * (t + 1.0)
        bump = (1.0 - s * s) * (1.0 - t * t)
        height = config.box_size[2]
    # Crowned top: heights grow towards the middle of the pressed face
    z = height * w * (1.0 + crown * bump)
    return np.column_stack([x, y, z])


def generate_mesh(config: SynthConfig) -> UnstructuredMesh:
    """
    Closed tetrahedral mesh of the configured solid, deterministic per seed.

    Raises:
        InfeasibleResolutionError: the target surface node count cannot be met
    """
    lattice = resolve_lattice(config)
    rng = spawn_rngs(config.seed, 3)[0]
    cells = lattice_cells(lattice)
    params = _lattice_parameters(lattice, config.jitter, rng)
    if config.die is Die.UPPER:
        # Dished working face, mirrored to point down; the mirror flips orientation
        points = _map_to_solid(params, config, crown=-config.crown)
        points[:, 2] = points[:, 2].max() - points[:, 2]
        cells = cells[:, [0, 1, 3, 2]]
    else:
        points = _map_to_solid(params, config, crown=config.crown)
    mesh = UnstructuredMesh(points=points, cells=cells).validate()
    logger.info(
        f"Generated {config.label} mesh on a {lattice[0]}x{lattice[1]}x{lattice[2]} lattice: "
        f"{mesh.n_points} points, {mesh.n_cells} tetrahedra, {surface_node_count(lattice)} surface nodes"
    )
    return mesh
