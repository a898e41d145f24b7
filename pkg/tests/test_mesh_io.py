# external imports
import io

import numpy as np
import pytest

# internal imports
from core.exceptions import MeshParseError, MeshValidationError, UnsupportedCellError
from modules.mesh_io import UnstructuredMesh, read_vtk, read_vtk_file, write_vtk, write_vtk_file
from modules.synth import Geometry, SynthConfig, generate_dataset


def test_read_single_tet(single_tet_text):
    mesh = read_vtk(single_tet_text)
    assert mesh.n_points == 4
    assert mesh.n_cells == 1
    assert mesh.cells.tolist() == [[0, 1, 2, 3]]
    np.testing.assert_array_equal(mesh.cell_fields["wear"], [100.0])
    assert mesh.point_fields == {}


def test_read_from_stream(single_tet_text):
    assert read_vtk(io.StringIO(single_tet_text)) == read_vtk(single_tet_text)


def test_round_trip_is_exact(rng):
    mesh = UnstructuredMesh(
        points=rng.normal(size=(5, 3)) * 1e-3,
        cells=[[0, 1, 2, 3], [1, 2, 3, 4]],
        cell_fields={"wear": [1.0 / 3.0, np.pi], "pressure": [np.nan, -0.0]},
        point_fields={"wear_pred": rng.uniform(size=5)},
    )
    again = read_vtk(write_vtk(mesh))
    assert again == mesh
    assert read_vtk(write_vtk(again)) == mesh


@pytest.mark.parametrize("geometry", list(Geometry))
def test_generated_dataset_round_trips(geometry):
    config = SynthConfig(geometry=geometry, lattice=(3, 3, 2), jitter=0.1, grid_size=6, seed=4)
    for mesh, meta in generate_dataset(config):
        assert read_vtk(write_vtk(mesh, title=meta.source_id)) == mesh


def test_out_of_range_index_rejected():
    text = """# vtk DataFile Version 3.0
bad
ASCII
DATASET UNSTRUCTURED_GRID
POINTS 5 double
0 0 0 1 0 0 0 1 0 0 0 1 1 1 1
CELLS 1 5
4 0 1 2 7
CELL_TYPES 1
10
"""
    with pytest.raises(MeshValidationError, match="7"):
        read_vtk(text)


def test_non_tetra_cell_rejected(single_tet_text):
    with pytest.raises(UnsupportedCellError):
        read_vtk(single_tet_text.replace("CELL_TYPES 1\n10", "CELL_TYPES 1\n12"))


def test_parse_error_carries_line_number(single_tet_text):
    broken = single_tet_text.replace("1 0 0\n", "1 zero 0\n", 1)
    with pytest.raises(MeshParseError) as info:
        read_vtk(broken)
    assert info.value.line == 7


def test_binary_files_rejected(single_tet_text):
    with pytest.raises(MeshParseError):
        read_vtk(single_tet_text.replace("ASCII", "BINARY"))


def test_write_contains_cell_types(single_tet):
    lines = write_vtk(single_tet).splitlines()
    start = lines.index("CELL_TYPES 1")
    assert lines[start + 1] == "10"


def test_write_point_data_section(single_tet):
    single_tet.point_fields["wear_pred"] = np.array([1.0, 2.0, 3.0, 4.0])
    text = write_vtk(single_tet)
    assert "POINT_DATA 4" in text
    assert "SCALARS wear_pred double 1" in text


def test_write_without_fields_omits_data_sections():
    mesh = UnstructuredMesh(points=np.eye(4, 3), cells=[[0, 1, 2, 3]])
    text = write_vtk(mesh)
    assert "CELL_DATA" not in text
    assert "POINT_DATA" not in text


def test_file_helpers(tmp_path, single_tet):
    path = write_vtk_file(tmp_path / "out" / "mesh.vtk", single_tet, title="two\nlines")
    assert read_vtk_file(path) == single_tet
    assert path.read_text().splitlines()[1] == "two"


def test_file_parse_error_names_path(tmp_path):
    path = tmp_path / "broken.vtk"
    path.write_text("not a vtk file\n")
    with pytest.raises(MeshParseError, match="broken.vtk"):
        read_vtk_file(path)
