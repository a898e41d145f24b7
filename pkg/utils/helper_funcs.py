# external imports
import os
import shutil
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, Union

import numpy as np

# internal imports
from core.logger import setup_logger
logger = setup_logger(__name__)

PathLike = Union[str, Path]


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """
    Create the seeded generator every random draw in the pipeline goes through.
    """
    return np.random.default_rng(seed)


def spawn_rngs(seed: Optional[int], count: int) -> List[np.random.Generator]:
    """
    Independent generators derived from one seed, e.g. one for the visiting
    order and one for dropout masks.
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def _current_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write_bytes(path: PathLike, payload: bytes) -> Path:
    """
    Write bytes to a temporary sibling file and rename it over the target.

    Either the complete file appears at `path` or nothing does.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.chmod(tmp_name, 0o666 & ~_current_umask())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"Wrote {len(payload)} bytes to {target}")
    return target


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Text variant of atomic_write_bytes (UTF-8, newlines written verbatim).
    """
    return atomic_write_bytes(path, text.encode("utf-8"))


@contextmanager
def staging_directory(out_dir: PathLike) -> Iterator[Path]:
    """
    Yield a scratch directory next to `out_dir`; on success its files are moved
    into `out_dir`, on failure it is removed so no partial output is left behind.
    """
    target = Path(out_dir)
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))
    try:
        yield staging
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise

    if not target.exists():
        os.replace(staging, target)
        # mkdtemp creates 0700; publish with the mode a plain mkdir would give
        os.chmod(target, 0o777 & ~_current_umask())
        return
    for entry in sorted(staging.iterdir()):
        os.replace(entry, target / entry.name)
    staging.rmdir()


class Stopwatch:
    """
    Wall-clock timer used for epoch and inference timings.

    Example:
        >>> with Stopwatch() as watch:
        ...     run()
        >>> watch.milliseconds
    """

    def __init__(self) -> None:
        self._start: Optional[float] = None
        self.seconds: float = 0.0

    def __enter__(self) -> "Stopwatch":
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.seconds = time.perf_counter() - self._start

    @property
    def milliseconds(self) -> float:
        return self.seconds * 1000.0
