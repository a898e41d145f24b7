# external imports
import argparse
import json
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

from pydantic import ValidationError

# internal imports
from core.config import settings
from core.constants import CHECKPOINT_FILE, CURVE_FILE, EVALUATION_FILE
from core.exceptions import ForgeWearError, InvalidParameterError, ManifestError
from core.logger import setup_logger
from modules.cli.manifest import load_dataset, read_manifest, write_manifest
from modules.cli.schemas import Manifest, ManifestRecord
from modules.mesh_io import MeshMetadata, read_vtk_file, write_vtk_file
from modules.metrics import (
    EvalSummary,
    comparison_table,
    dataset_comparison_table,
    dataset_statistics,
    evaluate,
    format_table,
    metrics_frame,
    summary_table,
)
from modules.nn import VARIANT_ALIASES, DropoutPlacement, ModelSpec, Variant, build_model, checkpoint_header, load_checkpoint, save_checkpoint
from modules.preprocess import Split
from modules.synth import Die, Geometry, SynthConfig, dataset_splits, generate_dataset
from modules.train import LossKind, TrainConfig, predict, train
from utils.helper_funcs import atomic_write_text, staging_directory

logger = setup_logger(__name__)

CommandHandler = Callable[[argparse.Namespace], int]


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{value}'")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def _tolerance(value: str) -> Optional[float]:
    if value.lower() in ("none", "off"):
        return None
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, 'inf' or 'none', got '{value}'")


def cmd_gen_synth(args: argparse.Namespace) -> int:
    config = SynthConfig(
        geometry=args.geometry,
        grid_size=args.grid,
        target_surface_nodes=args.surface_nodes,
        seed=args.seed,
        die=args.die,
    )
    samples = generate_dataset(config)
    splits = dataset_splits(config)
    records = []
    with staging_directory(args.out) as stage:
        for (mesh, meta), split in zip(samples, splits):
            file_name = f"{meta.source_id}.vtk"
            write_vtk_file(stage / file_name, mesh, title=f"forgewear synthetic {config.label} {meta.source_id}")
            records.append(ManifestRecord(
                mesh_path=file_name,
                temperature=meta.temperature,
                friction_coefficient=meta.friction_coefficient,
                split=split,
                source_id=meta.source_id,
            ))
        manifest = Manifest(records=records, geometry=str(config.geometry), die=str(config.die))
        write_manifest(stage / settings.manifest_name, manifest)
    print(f"wrote {len(records)} meshes and {Path(args.out) / settings.manifest_name}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    if not manifest.records_for(Split.TRAIN):
        raise ManifestError(f"{args.manifest}: no record in the train split")
    dataset = load_dataset(manifest)

    variant = Variant.from_name(args.variant)
    spec = ModelSpec(
        variant=variant,
        dropout_p=args.dropout,
        node_count=dataset.n_nodes if variant.needs_node_count else None,
        seed=args.seed,
        dropout_placement=args.dropout_placement,
    )
    config = TrainConfig(
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        loss=args.loss,
        seed=args.seed,
        plateau_relative_tolerance=args.plateau_tolerance,
    )
    model, report = train(build_model(spec), dataset, config)

    val = dataset.subset(Split.VAL)
    summary = evaluate(model, val.graphs, dataset.normalization, val.source_ids) if len(val) else None
    evaluation = {
        "variant": str(variant),
        "split": str(Split.VAL),
        "stop_reason": str(report.stop_reason),
        "epochs_completed": report.completed_epochs,
        "config": config.model_dump(mode="json"),
        "final_metrics": report.final_metrics,
        "statistics": {k: v.model_dump() for k, v in dataset_statistics(dataset).items()},
        "summary": summary.model_dump() if summary is not None else None,
    }
    with staging_directory(args.out) as stage:
        save_checkpoint(stage / CHECKPOINT_FILE, model, dataset.normalization, dataset=manifest.label)
        atomic_write_text(stage / CURVE_FILE, report.curve_csv())
        atomic_write_text(stage / EVALUATION_FILE, json.dumps(evaluation, indent=2, sort_keys=True) + "\n")

    print(f"{variant}: {report.completed_epochs} epochs ({report.stop_reason})")
    if summary is not None:
        print(format_table(summary_table(summary, label=f"{variant.alias} (val)")))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model, normalization = load_checkpoint(args.checkpoint)
    mesh = read_vtk_file(args.mesh)
    meta = MeshMetadata(
        temperature=args.temperature,
        friction_coefficient=args.friction,
        source_id=Path(args.mesh).stem,
    )
    result = predict(model, normalization, mesh, meta)
    write_vtk_file(args.out, result.mesh, title=f"forgewear prediction {model.spec.variant}")
    print(f"wrote {args.out}")
    print(f"inference {result.inference_ms:.3f} ms (total {result.total_ms:.3f} ms)")
    return 0


def _load_splits(manifest_paths: Sequence[str], split_name: str) -> Dict[str, tuple]:
    """Dataset label -> (full dataset, chosen split), one entry per manifest."""
    split = None if split_name == "all" else Split(split_name)
    datasets: Dict[str, tuple] = {}
    for manifest_path in manifest_paths:
        manifest = read_manifest(manifest_path)
        label = manifest.label
        if label in datasets:
            label = f"{label} [{Path(manifest_path).parent.name or manifest_path}]"
        dataset = load_dataset(manifest)
        chosen = dataset if split is None else dataset.subset(split)
        if not len(chosen):
            raise ManifestError(f"{manifest_path}: no record in the {split_name} split")
        datasets[label] = (dataset, chosen)
    return datasets


def cmd_evaluate(args: argparse.Namespace) -> int:
    datasets = _load_splits(args.manifest, args.split)

    # With several manifests a checkpoint is scored on the dataset it was trained
    # on; checkpoints without a matching label are scored on all of them
    columns: Dict[str, Dict[str, EvalSummary]] = {label: {} for label in datasets}
    for path in args.checkpoint:
        trained_on = checkpoint_header(path).get("dataset")
        model, normalization = load_checkpoint(path)
        targets = [trained_on] if len(datasets) > 1 and trained_on in datasets else list(datasets)
        label = model.spec.variant.alias
        if any(label in columns[t] for t in targets):
            label = f"{label} [{Path(path).parent.name or Path(path).stem}]"
        for target in targets:
            chosen = datasets[target][1]
            columns[target][label] = evaluate(model, chosen.graphs, normalization, chosen.source_ids)

    for column, summaries in columns.items():
        if len(columns) > 1:
            print(f"{column}:")
        if summaries:
            print(format_table(metrics_frame(summaries)))
        else:
            print("(no checkpoint trained on this dataset)")
    if len(columns) > 1:
        print()
        print(format_table(dataset_comparison_table(columns)))
    elif sum(len(s) for s in columns.values()) > 1:
        print()
        print(format_table(comparison_table(next(iter(columns.values())), column=args.split)))

    if args.out:
        payload = {
            "split": args.split,
            "checkpoints": [str(p) for p in args.checkpoint],
            "datasets": {
                column: {
                    "statistics": {k: v.model_dump() for k, v in dataset_statistics(datasets[column][0]).items()},
                    "models": {label: s.model_dump() for label, s in summaries.items()},
                }
                for column, summaries in columns.items()
            },
        }
        if len(columns) == 1:
            only = next(iter(payload["datasets"].values()))
            payload.update(statistics=only["statistics"], models=only["models"])
        atomic_write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


_command_map: Dict[str, CommandHandler] = {
    "gen-synth": cmd_gen_synth,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forgewear",
        description="Graph neural network surrogates for die wear in forging simulations.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = commands.add_parser("gen-synth", help="generate a synthetic dataset of labeled meshes")
    gen.add_argument("--geometry", choices=[g.value for g in Geometry], default=Geometry.CYLINDER.value)
    gen.add_argument("--grid", type=_positive_int, required=True, help="number of (temperature, friction) pairs")
    gen.add_argument("--die", choices=[d.value for d in Die], default=Die.LOWER.value, help="upper die is pressed the opposite way")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed", type=int, default=settings.seed)
    gen.add_argument("--surface-nodes", type=_positive_int, default=500, help="target surface node count")

    fit = commands.add_parser("train", help="train a model on the train split of a manifest")
    fit.add_argument("--manifest", required=True)
    fit.add_argument(
        "--variant",
        choices=VARIANT_ALIASES + [v.value for v in Variant],
        default=Variant.EDGE_CONV_LINEAR.alias,
    )
    fit.add_argument("--epochs", type=_positive_int, default=settings.epochs)
    fit.add_argument("--lr", type=float, default=settings.learning_rate)
    fit.add_argument("--weight-decay", type=float, default=settings.weight_decay)
    fit.add_argument("--dropout", type=float, default=settings.dropout_p)
    fit.add_argument("--dropout-placement", choices=[p.value for p in DropoutPlacement], default=DropoutPlacement.BOTH.value)
    fit.add_argument("--loss", choices=[k.value for k in LossKind], default=LossKind.MSE.value)
    fit.add_argument("--seed", type=int, default=settings.seed)
    fit.add_argument(
        "--plateau-tolerance",
        type=_tolerance,
        default=settings.plateau_relative_tolerance,
        help="minimum relative loss improvement per window ('none' disables the check)",
    )
    fit.add_argument("--out", required=True, help="output directory for checkpoint, curve and evaluation")

    run = commands.add_parser("predict", help="predict the wear field of one mesh")
    run.add_argument("--checkpoint", required=True)
    run.add_argument("--mesh", required=True)
    run.add_argument("--temperature", type=float, required=True)
    run.add_argument("--friction", type=float, required=True)
    run.add_argument("--out", required=True)

    score = commands.add_parser("evaluate", help="evaluate checkpoints on the split of one or more manifests")
    score.add_argument("--checkpoint", action="append", required=True, help="repeat to compare models")
    score.add_argument("--manifest", action="append", required=True, help="repeat for one column per die or dataset")
    score.add_argument("--split", choices=[s.value for s in Split] + ["all"], default=Split.TEST.value)
    score.add_argument("--out", help="write the machine-readable summary as JSON")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        0 on success, 1 on a pipeline or I/O error; usage errors exit with 2
    """
    args = build_parser().parse_args(argv)
    handler = _command_map[args.command]
    try:
        return handler(args)
    except ValidationError as e:
        error = InvalidParameterError(str(e))
        logger.error(f"{args.command} failed: {str(error)}")
    except (ForgeWearError, OSError) as e:
        logger.error(f"{args.command} failed: {str(e)}")
    return 1
