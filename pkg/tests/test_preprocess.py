# external imports
from collections import Counter
from itertools import combinations

import numpy as np
import pytest

# internal imports
from core.exceptions import MeshValidationError, NonManifoldError, TopologyMismatchError, UnknownFieldError
from modules.mesh_io import MeshMetadata, UnstructuredMesh
from modules.preprocess import (
    GraphDataset,
    Split,
    apply_normalization,
    boundary_faces,
    build_dataset,
    build_graph,
    cell_to_point,
    extract_surface,
    fit_normalization,
    point_cell_incidence,
)
from modules.synth import lattice_cells


def _brute_force_surface(cells):
    """Face multiplicities by enumeration, the slow way."""
    counts = Counter(tuple(sorted(face)) for cell in cells.tolist() for face in combinations(cell, 3))
    faces = sorted(face for face, n in counts.items() if n == 1)
    nodes = sorted({v for face in faces for v in face})
    edges = sorted({pair for face in faces for pair in combinations(face, 2)})
    return faces, nodes, edges


def test_cell_to_point_averages(two_tets):
    values = cell_to_point(two_tets, "wear")
    assert values[0] == 100.0
    assert values[1] == 150.0
    np.testing.assert_array_equal(values, [100.0, 150.0, 150.0, 150.0, 200.0])


def test_cell_to_point_unknown_field(two_tets):
    with pytest.raises(UnknownFieldError, match="temperature"):
        cell_to_point(two_tets, "temperature")


def test_cell_to_point_orphan_point():
    mesh = UnstructuredMesh(points=np.zeros((5, 3)), cells=[[0, 1, 2, 3]], cell_fields={"wear": [1.0]})
    with pytest.raises(MeshValidationError, match="point 4"):
        cell_to_point(mesh, "wear")


def test_single_tet_surface(single_tet):
    surface = extract_surface(single_tet)
    assert surface.faces.shape == (4, 3)
    assert surface.node_ids.tolist() == [0, 1, 2, 3]
    assert surface.edges.shape == (6, 2)


def test_two_tets_surface(two_tets):
    surface = extract_surface(two_tets)
    assert surface.faces.shape[0] == 6
    assert [1, 2, 3] not in surface.faces.tolist()
    assert surface.node_ids.tolist() == [0, 1, 2, 3, 4]
    assert surface.edges.shape[0] == 9


def test_kuhn_cube_surface():
    cells = lattice_cells((1, 1, 1))
    mesh = UnstructuredMesh(
        points=[[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)],
        cells=cells,
    )
    surface = extract_surface(mesh)
    faces, nodes, edges = _brute_force_surface(cells)
    assert surface.faces.shape[0] == 12
    assert surface.faces.tolist() == [list(f) for f in faces]
    assert surface.node_ids.tolist() == nodes == list(range(8))
    assert [tuple(surface.node_ids[e]) for e in surface.edges] == edges


@pytest.mark.parametrize("lattice", [(2, 2, 2), (3, 2, 1), (4, 3, 2)])
def test_surface_matches_brute_force(lattice):
    cells = lattice_cells(lattice)
    faces, nodes, edges = _brute_force_surface(cells)
    n_points = int(cells.max()) + 1
    surface = extract_surface(UnstructuredMesh(points=np.zeros((n_points, 3)), cells=cells))
    assert surface.faces.tolist() == [list(f) for f in faces]
    assert surface.node_ids.tolist() == nodes
    assert [tuple(surface.node_ids[e]) for e in surface.edges] == edges


def test_surface_is_independent_of_cell_order(rng):
    cells = lattice_cells((3, 3, 2))
    shuffled = cells[rng.permutation(cells.shape[0])]
    shuffled = np.array([rng.permutation(c) for c in shuffled])
    first = extract_surface(UnstructuredMesh(points=np.zeros((48, 3)), cells=cells))
    second = extract_surface(UnstructuredMesh(points=np.zeros((48, 3)), cells=shuffled))
    np.testing.assert_array_equal(first.node_ids, second.node_ids)
    np.testing.assert_array_equal(first.edges, second.edges)


def test_boundary_faces_opposite_vertex(single_tet):
    bounds = boundary_faces(single_tet.cells)
    for face, opposite in zip(bounds.faces.tolist(), bounds.opposite.tolist()):
        assert sorted(face + [opposite]) == [0, 1, 2, 3]


def test_face_in_three_tets_is_non_manifold():
    cells = [[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]]
    with pytest.raises(NonManifoldError):
        boundary_faces(np.array(cells))


def test_build_graph_single_tet(single_tet):
    graph = build_graph(single_tet, {"temperature": 1000.0, "friction_coefficient": 0.3})
    assert graph.n_nodes == 4
    assert graph.features[0].tolist() == [0.0, 0.0, 0.0, 1000.0, 0.3]
    assert graph.wear is None


def test_build_graph_with_wear(two_tets, meta):
    graph = build_graph(two_tets, meta, wear_field="wear")
    np.testing.assert_array_equal(graph.wear, [100.0, 150.0, 150.0, 150.0, 200.0])
    assert (graph.edges[:, 0] < graph.edges[:, 1]).all()


def test_build_graph_zero_wear(two_tets, meta):
    two_tets.cell_fields["wear"] = np.zeros(2)
    graph = build_graph(two_tets, meta, wear_field="wear")
    assert (graph.wear == 0).all()


def test_normalization_two_points(single_tet):
    graph = build_graph(single_tet, MeshMetadata(temperature=1000.0, friction_coefficient=0.3))
    graph = graph.with_features(np.array([
        [0.0, 0, 0, 1000, 0.3],
        [2.0, 0, 0, 1000, 0.3],
        [0.0, 0, 0, 1000, 0.3],
        [2.0, 0, 0, 1000, 0.3],
    ]))
    normalization = fit_normalization([graph])
    assert normalization.shift[0] == 1.0
    assert normalization.scale[0] == 1.0
    assert normalization.shift[3] == 1000.0
    assert normalization.scale[3] == 1.0
    normalized = apply_normalization(graph, normalization).features
    assert normalized[:, 0].tolist() == [-1.0, 1.0, -1.0, 1.0]
    assert (normalized[:, 3] == 0).all()
    assert graph.features[1, 0] == 2.0


def test_dataset_rejects_topology_mismatch(single_tet, two_tets, meta):
    with pytest.raises(TopologyMismatchError):
        build_dataset([(single_tet, meta), (two_tets, meta)], wear_field="wear")


def test_dataset_fits_on_train_split_only(two_tets):
    samples = [
        (two_tets, MeshMetadata(temperature=t, friction_coefficient=0.1, source_id=f"s{i}"))
        for i, t in enumerate([800.0, 1000.0, 5000.0])
    ]
    dataset = build_dataset(samples, "wear", splits=[Split.TRAIN, Split.TRAIN, Split.TEST], workers=2)
    assert dataset.source_ids == ["s0", "s1", "s2"]
    assert dataset.normalization.shift[3] == 900.0
    assert len(dataset.subset(Split.TEST)) == 1
    assert isinstance(dataset, GraphDataset)


def _random_tet_mesh(rng, max_cells=50):
    """Random conforming mesh: a random subset of Kuhn-split lattice cells with
    shuffled labels, scattered points and a random wear field."""
    pool = lattice_cells((3, 3, 3))
    picked = pool[rng.choice(pool.shape[0], size=int(rng.integers(1, max_cells + 1)), replace=False)]
    used, compact = np.unique(picked, return_inverse=True)
    relabel = rng.permutation(used.size)
    cells = relabel[compact.reshape(-1, 4)]
    cells = np.take_along_axis(cells, np.argsort(rng.random(cells.shape), axis=1), axis=1)
    return UnstructuredMesh(
        points=rng.normal(size=(used.size, 3)),
        cells=cells,
        cell_fields={"wear": rng.uniform(0.0, 50.0, size=cells.shape[0])},
    )


def test_surface_matches_brute_force_on_random_meshes(rng):
    for _ in range(100):
        mesh = _random_tet_mesh(rng)
        faces, nodes, edges = _brute_force_surface(mesh.cells)
        surface = extract_surface(mesh)
        assert [tuple(f) for f in surface.faces.tolist()] == faces
        assert surface.node_ids.tolist() == nodes
        assert [tuple(pair) for pair in surface.node_ids[surface.edges].tolist()] == edges


def test_surface_properties_on_random_meshes(rng):
    for _ in range(50):
        mesh = _random_tet_mesh(rng)
        surface = extract_surface(mesh)
        assert surface.node_ids.size <= mesh.n_points
        # The boundary of a tet chain is closed: every edge lies on an even
        # number of boundary faces, exactly two where the surface is manifold
        per_edge = Counter(
            pair for face in surface.faces.tolist() for pair in combinations(face, 2)
        )
        edge_pairs = {tuple(pair) for pair in surface.node_ids[surface.edges].tolist()}
        assert set(per_edge) == edge_pairs
        assert all(n >= 2 and n % 2 == 0 for n in per_edge.values())


@pytest.mark.parametrize("lattice", [(1, 1, 1), (3, 2, 2)])
def test_closed_box_edges_border_two_faces(lattice):
    mesh = UnstructuredMesh(
        points=np.zeros(((lattice[0] + 1) * (lattice[1] + 1) * (lattice[2] + 1), 3)),
        cells=lattice_cells(lattice),
    )
    faces = extract_surface(mesh).faces.tolist()
    per_edge = Counter(pair for face in faces for pair in combinations(face, 2))
    assert set(per_edge.values()) == {2}


def test_cell_to_point_stays_within_cell_range(rng):
    for _ in range(50):
        mesh = _random_tet_mesh(rng)
        values = cell_to_point(mesh, "wear")
        wear = mesh.cell_fields["wear"]
        for point in range(mesh.n_points):
            owners = wear[(mesh.cells == point).any(axis=1)]
            assert owners.min() - 1e-9 <= values[point] <= owners.max() + 1e-9


def test_point_cell_incidence(two_tets):
    incidence = point_cell_incidence(two_tets).toarray()
    np.testing.assert_array_equal(incidence, [[1, 0], [1, 1], [1, 1], [1, 1], [0, 1]])


def test_build_graph_invariants_on_random_meshes(rng, meta):
    for _ in range(50):
        mesh = _random_tet_mesh(rng)
        graph = build_graph(mesh, meta, wear_field="wear")
        graph.validate()
        assert (np.diff(graph.node_ids) > 0).all()
        np.testing.assert_array_equal(graph.positions, mesh.points[graph.node_ids])
        np.testing.assert_array_equal(graph.features[:, :3], graph.positions)
        assert (graph.features[:, 3] == meta.temperature).all()
        assert (graph.features[:, 4] == meta.friction_coefficient).all()
        assert (graph.edges[:, 0] < graph.edges[:, 1]).all()
        assert (graph.wear >= 0).all()


def test_normalization_is_idempotent(rng, meta):
    graphs = [build_graph(_random_tet_mesh(rng), meta) for _ in range(3)]
    first = fit_normalization(graphs)
    normalized = [apply_normalization(g, first) for g in graphs]
    again = fit_normalization(normalized)
    np.testing.assert_allclose(again.shift, 0.0, atol=1e-12)
    np.testing.assert_allclose(again.scale, 1.0, rtol=1e-12)
