"""
VTK Legacy Module

Reads and writes ASCII legacy VTK files holding an UNSTRUCTURED_GRID made of
linear tetrahedra, with scalar CELL_DATA and POINT_DATA arrays. Every number is
handled as a 64-bit float (indices as 64-bit integers) whatever type the file
declares, and written with 17 significant digits so read(write(mesh)) is exact.
"""

# external imports
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Tuple, Union

import numpy as np

# internal imports
from core.constants import VTK_FLOAT_FORMAT, VTK_HEADER, VTK_TETRA
from core.exceptions import MeshParseError, UnsupportedCellError
from core.logger import setup_logger
from modules.mesh_io.schemas import UnstructuredMesh
from utils.helper_funcs import atomic_write_text

logger = setup_logger(__name__)

_SUPPORTED_KEYWORDS = ("POINTS", "CELLS", "CELL_TYPES", "CELL_DATA", "POINT_DATA", "SCALARS")


class _LineReader:
    """Line cursor over the input that remembers 1-based line numbers."""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def last_line(self) -> int:
        return max(self.pos, 1)

    def raw_line(self) -> Tuple[int, Optional[str]]:
        if self.pos >= len(self.lines):
            return self.pos + 1, None
        self.pos += 1
        return self.pos, self.lines[self.pos - 1]

    def peek(self) -> Tuple[int, Optional[str]]:
        pos = self.pos
        while pos < len(self.lines):
            stripped = self.lines[pos].strip()
            if stripped:
                return pos + 1, stripped
            pos += 1
        return pos + 1, None

    def next_line(self) -> Tuple[int, Optional[str]]:
        while self.pos < len(self.lines):
            self.pos += 1
            stripped = self.lines[self.pos - 1].strip()
            if stripped:
                return self.pos, stripped
        return self.pos + 1, None

    def tokens(self, count: int, section: str) -> List[Tuple[int, str]]:
        """Collect exactly `count` whitespace-separated tokens, possibly over several lines."""
        out: List[Tuple[int, str]] = []
        while len(out) < count:
            lineno, line = self.next_line()
            if line is None:
                raise MeshParseError(
                    f"unexpected end of file in {section}: expected {count} values, found {len(out)}",
                    self.last_line,
                )
            parts = line.split()
            if len(out) + len(parts) > count:
                raise MeshParseError(
                    f"too many values in {section}: expected {count}", lineno
                )
            out.extend((lineno, part) for part in parts)
        return out


def _floats(tokens: List[Tuple[int, str]], section: str) -> np.ndarray:
    values = np.empty(len(tokens), dtype=np.float64)
    for i, (lineno, token) in enumerate(tokens):
        try:
            values[i] = float(token)
        except ValueError:
            raise MeshParseError(f"invalid number {token!r} in {section}", lineno) from None
    return values


def _ints(tokens: List[Tuple[int, str]], section: str) -> np.ndarray:
    values = np.empty(len(tokens), dtype=np.int64)
    for i, (lineno, token) in enumerate(tokens):
        try:
            values[i] = int(token)
        except ValueError:
            raise MeshParseError(f"invalid integer {token!r} in {section}", lineno) from None
    return values


def _count(parts: List[str], index: int, lineno: int) -> int:
    try:
        value = int(parts[index])
    except (IndexError, ValueError):
        raise MeshParseError(f"malformed section header {' '.join(parts)!r}", lineno) from None
    if value < 0:
        raise MeshParseError(f"negative count in {' '.join(parts)!r}", lineno)
    return value


def _read_header(reader: _LineReader) -> None:
    lineno, line = reader.raw_line()
    if line is None or not line.strip().lower().startswith("# vtk datafile version"):
        raise MeshParseError("missing '# vtk DataFile Version' header", lineno)
    lineno, title = reader.raw_line()
    if title is None:
        raise MeshParseError("missing title line", lineno)
    lineno, encoding = reader.next_line()
    if encoding is None or encoding.upper() != "ASCII":
        raise MeshParseError(f"only ASCII legacy files are supported, found {encoding!r}", lineno)
    lineno, dataset = reader.next_line()
    if dataset is None or dataset.split() != ["DATASET", "UNSTRUCTURED_GRID"]:
        raise MeshParseError(f"expected 'DATASET UNSTRUCTURED_GRID', found {dataset!r}", lineno)


def _split_cells(flat: np.ndarray, n_cells: int, lineno: int) -> np.ndarray:
    cells = np.empty((n_cells, 4), dtype=np.int64)
    cursor = 0
    for i in range(n_cells):
        if cursor >= flat.size:
            raise MeshParseError(f"CELLS list ends before cell {i}", lineno)
        size = int(flat[cursor])
        if size != 4:
            raise UnsupportedCellError(
                f"cell {i} has {size} points; only 4-point tetrahedra are supported"
            )
        if cursor + 5 > flat.size:
            raise MeshParseError(f"CELLS list ends inside cell {i}", lineno)
        cells[i] = flat[cursor + 1:cursor + 5]
        cursor += 5
    if cursor != flat.size:
        raise MeshParseError(
            f"CELLS size declares {flat.size} integers but {n_cells} cells use {cursor}", lineno
        )
    return cells


def read_vtk(text: Union[str, TextIO]) -> UnstructuredMesh:
    """
    Parse a legacy ASCII VTK unstructured grid of tetrahedra.

    Args:
        text: File content, or an open text stream

    Returns:
        UnstructuredMesh with every SCALARS array preserved under its verbatim name

    Raises:
        MeshParseError: malformed header or section, with the offending line number
        UnsupportedCellError: a cell that is not a VTK tetrahedron (type 10)
        MeshValidationError: a cell index outside [0, N_p) or repeated within a cell
    """
    if not isinstance(text, str):
        text = text.read()
    reader = _LineReader(text)
    _read_header(reader)

    points: Optional[np.ndarray] = None
    cells: Optional[np.ndarray] = None
    cell_types: Optional[np.ndarray] = None
    fields: Dict[str, Dict[str, np.ndarray]] = {"CELL_DATA": {}, "POINT_DATA": {}}
    active: Optional[str] = None
    active_count = 0

    while True:
        lineno, line = reader.next_line()
        if line is None:
            break
        parts = line.split()
        keyword = parts[0].upper()

        if keyword == "POINTS":
            n_points = _count(parts, 1, lineno)
            points = _floats(reader.tokens(3 * n_points, "POINTS"), "POINTS").reshape(n_points, 3)
        elif keyword == "CELLS":
            n_cells = _count(parts, 1, lineno)
            size = _count(parts, 2, lineno)
            flat = _ints(reader.tokens(size, "CELLS"), "CELLS")
            cells = _split_cells(flat, n_cells, lineno)
        elif keyword == "CELL_TYPES":
            n_types = _count(parts, 1, lineno)
            cell_types = _ints(reader.tokens(n_types, "CELL_TYPES"), "CELL_TYPES")
            bad = np.flatnonzero(cell_types != VTK_TETRA)
            if bad.size:
                raise UnsupportedCellError(
                    f"cell {int(bad[0])} has VTK type {int(cell_types[bad[0]])}; "
                    f"only tetrahedra ({VTK_TETRA}) are supported"
                )
        elif keyword in ("CELL_DATA", "POINT_DATA"):
            active = keyword
            active_count = _count(parts, 1, lineno)
            expected = None
            if keyword == "CELL_DATA" and cells is not None:
                expected = cells.shape[0]
            if keyword == "POINT_DATA" and points is not None:
                expected = points.shape[0]
            if expected is not None and expected != active_count:
                raise MeshParseError(f"{keyword} declares {active_count} values, mesh has {expected}", lineno)
        elif keyword == "SCALARS":
            if active is None:
                raise MeshParseError("SCALARS outside CELL_DATA/POINT_DATA", lineno)
            if len(parts) < 3:
                raise MeshParseError(f"malformed SCALARS header {line!r}", lineno)
            name = parts[1]
            if len(parts) > 3 and parts[3] != "1":
                raise MeshParseError(f"SCALARS '{name}' has {parts[3]} components; only 1 is supported", lineno)
            if name in fields[active]:
                raise MeshParseError(f"duplicate {active} array '{name}'", lineno)
            _, upcoming = reader.peek()
            if upcoming is not None and upcoming.split()[0].upper() == "LOOKUP_TABLE":
                reader.next_line()
            section = f"SCALARS {name}"
            fields[active][name] = _floats(reader.tokens(active_count, section), section)
        else:
            raise MeshParseError(
                f"unsupported section {parts[0]!r}; expected one of {', '.join(_SUPPORTED_KEYWORDS)}",
                lineno,
            )

    for name, value in (("POINTS", points), ("CELLS", cells), ("CELL_TYPES", cell_types)):
        if value is None:
            raise MeshParseError(f"missing {name} section", reader.last_line)
    if cell_types.shape[0] != cells.shape[0]:
        raise MeshParseError(
            f"CELL_TYPES lists {cell_types.shape[0]} entries for {cells.shape[0]} cells", reader.last_line
        )

    mesh = UnstructuredMesh(
        points=points,
        cells=cells,
        cell_fields=fields["CELL_DATA"],
        point_fields=fields["POINT_DATA"],
    )
    return mesh.validate()


def _format(values: np.ndarray) -> str:
    return " ".join(format(float(v), VTK_FLOAT_FORMAT) for v in values)


def write_vtk(mesh: UnstructuredMesh, title: str = "forgewear mesh") -> str:
    """
    Serialize a mesh as legacy ASCII VTK.

    Sections without arrays (no cell fields / no point fields) are omitted.
    """
    mesh.validate()
    lines = [
        VTK_HEADER,
        title.splitlines()[0] if title else "",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_points} double",
    ]
    lines.extend(_format(p) for p in mesh.points)
    lines.append(f"CELLS {mesh.n_cells} {5 * mesh.n_cells}")
    lines.extend("4 " + " ".join(str(int(i)) for i in cell) for cell in mesh.cells)
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines.extend([str(VTK_TETRA)] * mesh.n_cells)

    for keyword, count, arrays in (
        ("CELL_DATA", mesh.n_cells, mesh.cell_fields),
        ("POINT_DATA", mesh.n_points, mesh.point_fields),
    ):
        if not arrays:
            continue
        lines.append(f"{keyword} {count}")
        for name, values in arrays.items():
            lines.append(f"SCALARS {name} double 1")
            lines.append("LOOKUP_TABLE default")
            lines.extend(format(float(v), VTK_FLOAT_FORMAT) for v in values)
    return "\n".join(lines) + "\n"


def read_vtk_file(path: Union[str, Path]) -> UnstructuredMesh:
    path = Path(path)
    logger.debug(f"Reading mesh {path}")
    try:
        return read_vtk(path.read_text(encoding="utf-8"))
    except MeshParseError as e:
        error = MeshParseError(f"{path}: {e}")
        error.line = e.line
        raise error from e


def write_vtk_file(path: Union[str, Path], mesh: UnstructuredMesh, title: str = "forgewear mesh") -> Path:
    path = Path(path)
    logger.debug(f"Writing mesh {path} ({mesh.n_points} points, {mesh.n_cells} cells)")
    return atomic_write_text(path, write_vtk(mesh, title=title))
