# external imports
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

# internal imports
from core.config import settings
from core.logger import setup_logger
from modules.mesh_io.schemas import MeshMetadata, UnstructuredMesh
from modules.preprocess.normalization import fit_normalization
from modules.preprocess.schemas import GraphDataset, Split
from modules.preprocess.surface import build_graph

logger = setup_logger(__name__)


def build_dataset(
    samples: Sequence[Tuple[UnstructuredMesh, MeshMetadata]],
    wear_field: Optional[str],
    splits: Optional[Sequence[Split]] = None,
    workers: Optional[int] = None,
) -> GraphDataset:
    """
    Preprocess many simulations of one die into a GraphDataset.

    Graphs are built independently (on a thread pool when workers > 1, order
    preserved) and the normalization is fitted on the training split only.

    Args:
        samples: (mesh, metadata) pairs; metadata.source_id names each graph
        wear_field: Cell field used as target, None for unlabeled graphs
        splits: Partition of each sample, all training when omitted
        workers: Thread count, defaults to settings.preprocess_workers
    """
    workers = workers or settings.preprocess_workers

    def _build(sample: Tuple[UnstructuredMesh, MeshMetadata]):
        mesh, meta = sample
        return build_graph(mesh, meta, wear_field=wear_field)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            graphs = list(pool.map(_build, samples))
    else:
        graphs = [_build(s) for s in samples]

    dataset = GraphDataset(
        graphs=graphs,
        source_ids=[meta.source_id or f"graph_{i:03d}" for i, (_, meta) in enumerate(samples)],
        splits=list(splits) if splits is not None else [],
    )
    train_graphs = [dataset.graphs[i] for i in dataset.indices(Split.TRAIN)]
    if train_graphs:
        dataset.normalization = fit_normalization(train_graphs)
    logger.info(
        f"Built {len(dataset)} surface graphs with {dataset.n_nodes} nodes each "
        f"({len(train_graphs)} for training)"
    )
    return dataset
