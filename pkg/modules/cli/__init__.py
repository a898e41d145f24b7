from modules.cli.manifest import load_dataset, manifest_text, parse_manifest, read_manifest, write_manifest
from modules.cli.routers import build_parser, cmd_evaluate, cmd_gen_synth, cmd_predict, cmd_train, main
from modules.cli.schemas import Manifest, ManifestRecord

__all__ = [
    "Manifest",
    "ManifestRecord",
    "build_parser",
    "cmd_evaluate",
    "cmd_gen_synth",
    "cmd_predict",
    "cmd_train",
    "load_dataset",
    "main",
    "manifest_text",
    "parse_manifest",
    "read_manifest",
    "write_manifest",
]
