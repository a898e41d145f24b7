# external imports
from typing import List, Sequence, Tuple

import numpy as np

# internal imports
from core.logger import setup_logger
from modules.mesh_io.schemas import MeshMetadata, UnstructuredMesh
from modules.preprocess import Split
from modules.synth.mesh import generate_mesh
from modules.synth.schemas import SynthConfig
from modules.synth.wear import apply_wear_law
from utils.helper_funcs import spawn_rngs

logger = setup_logger(__name__)


def latin_hypercube(
    n: int, bounds: Sequence[Tuple[float, float]], rng: np.random.Generator
) -> np.ndarray:
    """(n, d) sample with exactly one point in each of the n strata of every axis."""
    columns = []
    for low, high in bounds:
        strata = (rng.permutation(n) + rng.random(n)) / n
        columns.append(low + strata * (high - low))
    return np.column_stack(columns)


def parameter_grid(config: SynthConfig) -> List[Tuple[float, float]]:
    """(temperature, friction) pairs, explicit or Latin-hypercube sampled."""
    if config.grid is not None:
        return [(float(t), float(mu)) for t, mu in config.grid]
    _, grid_rng, _ = spawn_rngs(config.seed, 3)
    sample = latin_hypercube(config.grid_size, [config.temperature_range, config.friction_range], grid_rng)
    return [(float(t), float(mu)) for t, mu in sample]


def assign_splits(n: int, fractions: Tuple[float, float, float], rng: np.random.Generator) -> List[Split]:
    """
    Seeded train/val/test assignment; val and test sizes are rounded shares of n
    and at least one graph always trains.
    """
    n_val = int(round(n * fractions[1]))
    n_test = int(round(n * fractions[2]))
    while n_val + n_test >= n and (n_val or n_test):
        if n_test >= n_val:
            n_test -= 1
        else:
            n_val -= 1
    labels = [Split.TRAIN] * (n - n_val - n_test) + [Split.VAL] * n_val + [Split.TEST] * n_test
    order = rng.permutation(n)
    return [labels[i] for i in order]


def generate_dataset(config: SynthConfig) -> List[Tuple[UnstructuredMesh, MeshMetadata]]:
    """
    One labeled mesh per grid point, all sharing the geometry and topology of
    a single generated mesh; only the wear field and metadata vary.
    """
    base = generate_mesh(config)
    samples = []
    for i, (temperature, friction) in enumerate(parameter_grid(config)):
        mesh = apply_wear_law(base, temperature, friction, config.effective_wear_law)
        meta = MeshMetadata(
            temperature=temperature,
            friction_coefficient=friction,
            source_id=f"sim_{i:03d}",
        )
        samples.append((mesh, meta))
    logger.info(f"Generated {len(samples)} synthetic simulations on one {config.label} die")
    return samples


def dataset_splits(config: SynthConfig) -> List[Split]:
    _, _, split_rng = spawn_rngs(config.seed, 3)
    return assign_splits(config.n_simulations, config.split_fractions, split_rng)
