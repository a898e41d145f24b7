# external imports
import json

import numpy as np
import pandas as pd
import pytest

# internal imports
from core.constants import CHECKPOINT_FILE, CURVE_FILE, EVALUATION_FILE, WEAR_PRED_FIELD
from modules.cli import main, read_manifest
from modules.mesh_io import read_vtk_file
from modules.nn import checkpoint_header, load_checkpoint, model_forward
from modules.preprocess import Split, apply_normalization, build_graph

GEN_FLAGS = ["--grid", "8", "--seed", "7", "--surface-nodes", "60"]


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic") / "d1"
    assert main(["gen-synth", "--out", str(out)] + GEN_FLAGS) == 0
    return out


@pytest.fixture(scope="module")
def trained(dataset_dir, tmp_path_factory):
    runs = tmp_path_factory.mktemp("runs")
    manifest = str(dataset_dir / "manifest.tsv")
    for variant in ("edgeconv-l", "pointnet"):
        code = main([
            "train", "--manifest", manifest, "--variant", variant,
            "--epochs", "1", "--seed", "3", "--out", str(runs / variant),
        ])
        assert code == 0
    return runs


def test_gen_synth_writes_meshes_and_manifest(dataset_dir):
    manifest = read_manifest(dataset_dir / "manifest.tsv")
    assert len(manifest.records) == 8
    assert manifest.geometry == "cylinder"
    assert {r.split for r in manifest.records} == {Split.TRAIN, Split.VAL, Split.TEST}
    for record in manifest.records:
        mesh = read_vtk_file(manifest.resolve(record))
        assert "wear" in mesh.cell_fields


def test_gen_synth_is_byte_identical(dataset_dir, tmp_path):
    again = tmp_path / "d1"
    assert main(["gen-synth", "--out", str(again)] + GEN_FLAGS) == 0
    names = sorted(p.name for p in dataset_dir.iterdir())
    assert names == sorted(p.name for p in again.iterdir())
    for name in names:
        assert (dataset_dir / name).read_bytes() == (again / name).read_bytes()


def test_gen_synth_rejects_empty_grid(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["gen-synth", "--grid", "0", "--out", str(tmp_path / "x")])
    assert info.value.code == 2
    assert "positive integer" in capsys.readouterr().err


def test_train_outputs(trained):
    run = trained / "edgeconv-l"
    assert (run / CHECKPOINT_FILE).is_file()
    lines = (run / CURVE_FILE).read_text().splitlines()
    assert lines[0].startswith("epoch,train_loss")
    assert len(lines) == 2

    evaluation = json.loads((run / EVALUATION_FILE).read_text())
    assert evaluation["variant"] == "edge_conv_linear"
    assert evaluation["epochs_completed"] == 1
    assert set(evaluation["statistics"]) == {"train", "test", "whole"}


def test_predict_matches_model_output(dataset_dir, trained, tmp_path, capsys):
    manifest = read_manifest(dataset_dir / "manifest.tsv")
    record = manifest.records_for(Split.TRAIN)[0]
    checkpoint = trained / "edgeconv-l" / CHECKPOINT_FILE
    out = tmp_path / "pred.vtk"
    code = main([
        "predict", "--checkpoint", str(checkpoint), "--mesh", str(manifest.resolve(record)),
        "--temperature", repr(record.temperature), "--friction", repr(record.friction_coefficient),
        "--out", str(out),
    ])
    assert code == 0
    printed = capsys.readouterr().out
    assert "inference" in printed and "ms" in printed

    predicted = read_vtk_file(out)
    model, normalization = load_checkpoint(checkpoint)
    graph = build_graph(read_vtk_file(manifest.resolve(record)), record.metadata)
    expected = model_forward(model, apply_normalization(graph, normalization)).values[:, 0]
    np.testing.assert_array_equal(predicted.point_fields[WEAR_PRED_FIELD][graph.node_ids], expected)


def test_predict_requires_temperature(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["predict", "--checkpoint", "c.npz", "--mesh", "m.vtk", "--friction", "0.3", "--out", "o.vtk"])
    assert info.value.code == 2
    assert "--temperature" in capsys.readouterr().err


def test_evaluate_compares_checkpoints(dataset_dir, trained, tmp_path, capsys):
    out = tmp_path / "comparison.json"
    code = main([
        "evaluate",
        "--checkpoint", str(trained / "edgeconv-l" / CHECKPOINT_FILE),
        "--checkpoint", str(trained / "pointnet" / CHECKPOINT_FILE),
        "--manifest", str(dataset_dir / "manifest.tsv"),
        "--split", "test",
        "--out", str(out),
    ])
    assert code == 0
    printed = capsys.readouterr().out
    for row in ("Mean", "Maximum", "MAE", "MSE", "Error%"):
        assert row in printed
    payload = json.loads(out.read_text())
    assert set(payload["models"]) == {"edgeconv-l", "pointnet"}
    assert payload["models"]["pointnet"]["n_nodes"] > 0


def test_missing_manifest_exits_with_error(tmp_path):
    code = main(["train", "--manifest", str(tmp_path / "missing.tsv"), "--out", str(tmp_path / "run")])
    assert code == 1
    assert not (tmp_path / "run").exists()


@pytest.fixture(scope="module")
def upper_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic") / "d1-upper"
    assert main(["gen-synth", "--out", str(out), "--die", "upper"] + GEN_FLAGS) == 0
    return out


def test_gen_synth_upper_die_manifest(dataset_dir, upper_dir):
    lower = read_manifest(dataset_dir / "manifest.tsv")
    upper = read_manifest(upper_dir / "manifest.tsv")
    assert (lower.label, upper.label) == ("cylinder/lower", "cylinder/upper")
    assert [r.temperature for r in upper.records] == [r.temperature for r in lower.records]
    lower_wear = read_vtk_file(lower.resolve(lower.records[0])).cell_fields["wear"]
    upper_wear = read_vtk_file(upper.resolve(upper.records[0])).cell_fields["wear"]
    assert not np.array_equal(lower_wear, upper_wear)


def test_train_records_dataset_in_checkpoint(trained):
    assert checkpoint_header(trained / "edgeconv-l" / CHECKPOINT_FILE)["dataset"] == "cylinder/lower"


def test_train_is_deterministic(dataset_dir, tmp_path):
    manifest = str(dataset_dir / "manifest.tsv")
    for name in ("a", "b"):
        code = main([
            "train", "--manifest", manifest, "--variant", "edgeconv-l",
            "--epochs", "3", "--seed", "11", "--out", str(tmp_path / name),
        ])
        assert code == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / CHECKPOINT_FILE).read_bytes() == (b / CHECKPOINT_FILE).read_bytes()
    assert (a / EVALUATION_FILE).read_bytes() == (b / EVALUATION_FILE).read_bytes()
    curve_a = pd.read_csv(a / CURVE_FILE).drop(columns=["seconds"])
    curve_b = pd.read_csv(b / CURVE_FILE).drop(columns=["seconds"])
    pd.testing.assert_frame_equal(curve_a, curve_b)


def test_evaluate_one_column_per_die(dataset_dir, upper_dir, trained, tmp_path, capsys):
    upper_run = tmp_path / "upper"
    code = main([
        "train", "--manifest", str(upper_dir / "manifest.tsv"), "--variant", "edgeconv-l",
        "--epochs", "1", "--seed", "3", "--out", str(upper_run),
    ])
    assert code == 0
    capsys.readouterr()

    out = tmp_path / "dies.json"
    code = main([
        "evaluate",
        "--checkpoint", str(trained / "edgeconv-l" / CHECKPOINT_FILE),
        "--checkpoint", str(upper_run / CHECKPOINT_FILE),
        "--manifest", str(dataset_dir / "manifest.tsv"),
        "--manifest", str(upper_dir / "manifest.tsv"),
        "--split", "test",
        "--out", str(out),
    ])
    assert code == 0
    printed = capsys.readouterr().out
    assert "cylinder/lower" in printed and "cylinder/upper" in printed

    payload = json.loads(out.read_text())
    assert set(payload["datasets"]) == {"cylinder/lower", "cylinder/upper"}
    for column in payload["datasets"].values():
        # each checkpoint is scored only on the die it was trained on
        assert set(column["models"]) == {"edgeconv-l"}
    lower = payload["datasets"]["cylinder/lower"]["models"]["edgeconv-l"]
    upper = payload["datasets"]["cylinder/upper"]["models"]["edgeconv-l"]
    assert lower["mae"] != upper["mae"]
    assert "models" not in payload
