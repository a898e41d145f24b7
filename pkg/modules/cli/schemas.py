# external imports
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

# internal imports
from core.constants import DEFAULT_WEAR_FIELD
from modules.mesh_io import MeshMetadata
from modules.preprocess import Split


class ManifestRecord(BaseModel):
    """One simulation: its mesh file and initial conditions."""
    mesh_path: str
    temperature: float
    friction_coefficient: float
    split: Split
    source_id: str

    @field_validator("split", mode="before")
    @classmethod
    def parse_split(cls, v):
        return Split(v.strip().lower()) if isinstance(v, str) else v

    @field_validator("friction_coefficient")
    @classmethod
    def validate_friction(cls, v):
        if v < 0:
            raise ValueError(f"Friction coefficient must be non-negative, got {v}")
        return v

    @field_validator("source_id", "mesh_path")
    @classmethod
    def single_token(cls, v):
        if not v or any(ch in v for ch in "\t\n\r"):
            raise ValueError(f"{v!r} must be non-empty and free of tabs and newlines")
        return v

    @property
    def metadata(self) -> MeshMetadata:
        return MeshMetadata(
            temperature=self.temperature,
            friction_coefficient=self.friction_coefficient,
            source_id=self.source_id,
        )


class Manifest(BaseModel):
    """
    Set of initial conditions of one die, one record per simulation.

    Relative mesh paths are resolved against `base_dir` (the manifest's folder).
    """
    records: List[ManifestRecord] = Field(default_factory=list)
    wear_field: str = DEFAULT_WEAR_FIELD
    geometry: str = ""
    die: str = ""
    base_dir: Optional[Path] = None

    @model_validator(mode="after")
    def unique_sources(self) -> "Manifest":
        seen = set()
        for record in self.records:
            if record.source_id in seen:
                raise ValueError(f"source_id '{record.source_id}' appears twice")
            seen.add(record.source_id)
        return self

    @property
    def label(self) -> str:
        """Column name in comparison tables, e.g. "cylinder/lower"."""
        parts = [p for p in (self.geometry, self.die) if p]
        if parts:
            return "/".join(parts)
        return self.base_dir.name if self.base_dir is not None else "dataset"

    def resolve(self, record: ManifestRecord) -> Path:
        path = Path(record.mesh_path)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path

    def records_for(self, split: Optional[Split]) -> List[ManifestRecord]:
        return [r for r in self.records if split is None or r.split == split]
