"""
Checkpoint container: a zip of .npy arrays plus a JSON header.

Entries are written in sorted order with a fixed timestamp so the same model
always produces the same bytes.
"""

# external imports
import io
import json
import zipfile
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

# internal imports
from core.constants import CHECKPOINT_FORMAT, CHECKPOINT_VERSION
from core.exceptions import CheckpointError
from core.logger import setup_logger
from modules.nn.base import BaseGraphModel
from modules.nn.schemas import ModelSpec
from modules.preprocess.schemas import Normalization
from utils.helper_funcs import atomic_write_bytes

logger = setup_logger(__name__)

_META_ENTRY = "meta.json"
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


def _entry(archive: zipfile.ZipFile, name: str, payload: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_FIXED_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    archive.writestr(info, payload)


def checkpoint_bytes(
    model: BaseGraphModel, normalization: Optional[Normalization], dataset: Optional[str] = None
) -> bytes:
    meta = {
        "dataset": dataset,
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "spec": model.spec.model_dump(mode="json"),
        "normalization": normalization.to_dict() if normalization is not None else None,
    }
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        _entry(archive, _META_ENTRY, json.dumps(meta, sort_keys=True, indent=2).encode("utf-8"))
        for name, array in sorted(model.state_dict().items()):
            array_buffer = io.BytesIO()
            np.lib.format.write_array(array_buffer, np.ascontiguousarray(array), allow_pickle=False)
            _entry(archive, f"{name}.npy", array_buffer.getvalue())
    return buffer.getvalue()


def save_checkpoint(
    path: Union[str, Path],
    model: BaseGraphModel,
    normalization: Optional[Normalization],
    dataset: Optional[str] = None,
) -> Path:
    """
    Atomically write spec, normalization and every parameter array.

    Args:
        dataset: Label of the training data (e.g. "cylinder/lower"), used to
            place the model in per-die comparison tables
    """
    target = atomic_write_bytes(path, checkpoint_bytes(model, normalization, dataset))
    logger.info(f"Saved {model.spec.variant} checkpoint to {target}")
    return target


def checkpoint_header(path: Union[str, Path]) -> dict:
    """JSON header of a checkpoint (format, version, spec, normalization, dataset)."""
    try:
        with zipfile.ZipFile(path) as archive:
            return json.loads(archive.read(_META_ENTRY).decode("utf-8"))
    except (zipfile.BadZipFile, KeyError, ValueError) as e:
        raise CheckpointError(f"{path}: not a readable checkpoint ({e})") from e


def load_checkpoint(path: Union[str, Path]) -> Tuple[BaseGraphModel, Optional[Normalization]]:
    """
    Rebuild a trained model from a checkpoint file.

    Raises:
        CheckpointError: Not a checkpoint, unknown version or mismatched arrays
    """
    from modules.nn import build_model

    payload = Path(path).read_bytes()
    try:
        with zipfile.ZipFile(io.BytesIO(payload)) as archive:
            meta = json.loads(archive.read(_META_ENTRY).decode("utf-8"))
        arrays = np.load(io.BytesIO(payload), allow_pickle=False)
        state = {name: arrays[name] for name in arrays.files if name != _META_ENTRY}
    except (zipfile.BadZipFile, KeyError, ValueError) as e:
        raise CheckpointError(f"{path}: not a readable checkpoint ({e})") from e

    if meta.get("format") != CHECKPOINT_FORMAT or meta.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: expected {CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}, "
            f"found {meta.get('format')} v{meta.get('version')}"
        )
    try:
        spec = ModelSpec.model_validate(meta["spec"])
    except ValidationError as e:
        raise CheckpointError(f"{path}: invalid model spec ({e})") from e

    model = build_model(spec)
    model.load_state_dict(state)
    normalization = meta.get("normalization")
    logger.info(f"Loaded {spec.variant} checkpoint from {path}")
    return model, Normalization.from_dict(normalization) if normalization else None
