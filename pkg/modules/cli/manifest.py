"""
Manifest codec.

A manifest is a tab-separated table behind a versioned comment header:

    # forgewear-manifest v1
    # wear_field=wear
    # geometry=cylinder
    # die=lower
    mesh_path	temperature	friction_coefficient	split	source_id
    sim_000.vtk	1012.5	0.31	train	sim_000
"""

# external imports
import io
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd
from pydantic import ValidationError

# internal imports
from core.constants import DEFAULT_WEAR_FIELD, MANIFEST_COLUMNS, MANIFEST_MAGIC, MANIFEST_VERSION
from core.exceptions import ManifestError, UnknownFieldError
from core.logger import setup_logger
from modules.cli.schemas import Manifest, ManifestRecord
from modules.mesh_io import read_vtk_file
from modules.preprocess import GraphDataset, build_dataset
from utils.helper_funcs import atomic_write_text

logger = setup_logger(__name__)


def manifest_text(manifest: Manifest) -> str:
    header = [
        f"{MANIFEST_MAGIC} v{MANIFEST_VERSION}",
        f"# wear_field={manifest.wear_field}",
        f"# geometry={manifest.geometry}",
        f"# die={manifest.die}",
    ]
    frame = pd.DataFrame(
        [[getattr(r, c) if c != "split" else r.split.value for c in MANIFEST_COLUMNS] for r in manifest.records],
        columns=list(MANIFEST_COLUMNS),
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, sep="\t", index=False, float_format="%.17g", lineterminator="\n")
    return "\n".join(header) + "\n" + buffer.getvalue()


def write_manifest(path: Union[str, Path], manifest: Manifest) -> Path:
    target = atomic_write_text(path, manifest_text(manifest))
    logger.info(f"Wrote manifest with {len(manifest.records)} records to {target}")
    return target


def _parse_header(lines: List[str], source: str) -> Tuple[Dict[str, str], int]:
    if not lines or not lines[0].startswith(MANIFEST_MAGIC):
        raise ManifestError(f"{source}: line 1: expected '{MANIFEST_MAGIC} v{MANIFEST_VERSION}'")
    version = lines[0][len(MANIFEST_MAGIC):].strip()
    if version != f"v{MANIFEST_VERSION}":
        raise ManifestError(f"{source}: unsupported manifest version '{version}'")
    fields = {}
    index = 1
    while index < len(lines) and lines[index].startswith("#"):
        key, sep, value = lines[index][1:].strip().partition("=")
        if not sep:
            raise ManifestError(f"{source}: line {index + 1}: expected '# key=value'")
        fields[key.strip()] = value.strip()
        index += 1
    return fields, index


def parse_manifest(text: str, base_dir: Optional[Path] = None, source: str = "<manifest>") -> Manifest:
    """
    Raises:
        ManifestError: bad header, missing columns or an invalid record
    """
    lines = text.splitlines()
    fields, body_start = _parse_header(lines, source)
    body = "\n".join(lines[body_start:])
    if not body.strip():
        raise ManifestError(f"{source}: missing column header")
    try:
        frame = pd.read_csv(
            io.StringIO(body),
            sep="\t",
            dtype={"mesh_path": str, "split": str, "source_id": str},
            float_precision="round_trip",
            keep_default_na=False,
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise ManifestError(f"{source}: {e}") from e

    missing = [c for c in MANIFEST_COLUMNS if c not in frame.columns]
    if missing:
        raise ManifestError(f"{source}: missing columns {missing}")

    records = []
    for offset, row in enumerate(frame[list(MANIFEST_COLUMNS)].to_dict("records")):
        try:
            records.append(ManifestRecord(**row))
        except ValidationError as e:
            line = body_start + 2 + offset
            raise ManifestError(f"{source}: line {line}: {e.errors()[0]['msg']}") from e
    try:
        return Manifest(
            records=records,
            wear_field=fields.get("wear_field", DEFAULT_WEAR_FIELD),
            geometry=fields.get("geometry", ""),
            die=fields.get("die", ""),
            base_dir=base_dir,
        )
    except ValidationError as e:
        raise ManifestError(f"{source}: {e.errors()[0]['msg']}") from e


def read_manifest(path: Union[str, Path], check_paths: bool = True) -> Manifest:
    """
    Read a manifest file; relative mesh paths resolve against its folder.

    Raises:
        ManifestError: malformed content or a mesh file that does not exist
    """
    path = Path(path)
    manifest = parse_manifest(path.read_text(encoding="utf-8"), base_dir=path.parent, source=str(path))
    if check_paths:
        for record in manifest.records:
            if not manifest.resolve(record).is_file():
                raise ManifestError(f"{path}: mesh file '{record.mesh_path}' of {record.source_id} not found")
    logger.info(f"Read manifest {path} with {len(manifest.records)} records")
    return manifest


def load_dataset(manifest: Manifest, workers: Optional[int] = None) -> GraphDataset:
    """Read every mesh of the manifest and preprocess them into one dataset."""
    samples = []
    for record in manifest.records:
        path = manifest.resolve(record)
        mesh = read_vtk_file(path)
        if manifest.wear_field not in mesh.cell_fields:
            raise UnknownFieldError(
                f"{path}: no cell field '{manifest.wear_field}'; available: {sorted(mesh.cell_fields) or 'none'}"
            )
        samples.append((mesh, record.metadata))
    return build_dataset(
        samples,
        wear_field=manifest.wear_field,
        splits=[r.split for r in manifest.records],
        workers=workers,
    )
