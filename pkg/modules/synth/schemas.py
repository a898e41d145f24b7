# external imports
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class Geometry(Enum):
    """Solid the synthetic die is cut from."""
    CYLINDER = "cylinder"
    CYLINDRICAL_SECTOR = "cylindrical_sector"
    BOX = "box"

    def __str__(self) -> str:
        return self.value


class Die(Enum):
    """Which half of the forging die is modelled; the upper die is the lower one
    mirrored through its mid-plane and pressed from below."""
    LOWER = "lower"
    UPPER = "upper"

    def __str__(self) -> str:
        return self.value


class WearLaw(BaseModel):
    """
    Analytic stand-in for the FEM wear output:
    wear = C * mu * (T / T0) * max(0, n . d)^k * 2000 on cells with a boundary face.
    """
    coefficient: float = 2.0
    reference_temperature: float = 1200.0
    exponent: float = 4.0
    press_direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    @field_validator("exponent")
    @classmethod
    def exponent_at_least_one(cls, v):
        if v < 1:
            raise ValueError(f"wear exponent must be at least 1, got {v}")
        return v

    @field_validator("reference_temperature")
    @classmethod
    def positive_reference(cls, v):
        if not v > 0:
            raise ValueError(f"reference temperature must be positive, got {v}")
        return v

    @field_validator("coefficient")
    @classmethod
    def nonnegative_coefficient(cls, v):
        if v < 0:
            raise ValueError(f"wear coefficient must be non-negative, got {v}")
        return v

    @field_validator("press_direction")
    @classmethod
    def unit_direction(cls, v):
        norm = math.sqrt(sum(c * c for c in v))
        if norm == 0 or not math.isfinite(norm):
            raise ValueError("press direction must be a nonzero finite vector")
        return tuple(c / norm for c in v)

    @property
    def direction(self) -> np.ndarray:
        return np.asarray(self.press_direction, dtype=np.float64)

    def reversed(self) -> "WearLaw":
        return self.model_copy(update={"press_direction": tuple(-c for c in self.press_direction)})


class SynthConfig(BaseModel):
    """
    Synthetic dataset description.

    Lengths are in meters. Either `lattice` (cells per axis) or
    `target_surface_nodes` fixes the resolution; the parameter grid is either
    the explicit `grid` or a Latin-hypercube sample of `grid_size` points.
    """
    geometry: Geometry = Geometry.CYLINDER
    die: Die = Die.LOWER
    target_surface_nodes: int = 500
    lattice: Optional[Tuple[int, int, int]] = None
    radius: float = 0.1
    inner_radius: float = 0.05
    sector_angle: float = math.pi / 2
    height: float = 0.05
    box_size: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    crown: float = 0.1
    jitter: float = 0.0
    grid: Optional[List[Tuple[float, float]]] = None
    grid_size: int = 40
    temperature_range: Tuple[float, float] = (800.0, 1200.0)
    friction_range: Tuple[float, float] = (0.1, 0.5)
    split_fractions: Tuple[float, float, float] = (0.75, 0.125, 0.125)
    wear_law: WearLaw = Field(default_factory=WearLaw)
    seed: int = 0

    @field_validator("geometry", mode="before")
    @classmethod
    def parse_geometry(cls, v):
        return Geometry(v) if isinstance(v, str) else v

    @field_validator("die", mode="before")
    @classmethod
    def parse_die(cls, v):
        return Die(v.strip().lower()) if isinstance(v, str) else v

    @field_validator("target_surface_nodes", "grid_size")
    @classmethod
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v

    @field_validator("lattice")
    @classmethod
    def lattice_cells(cls, v):
        if v is not None and min(v) < 1:
            raise ValueError(f"lattice needs at least one cell per axis, got {v}")
        return v

    @field_validator("radius", "height")
    @classmethod
    def positive_length(cls, v):
        if not v > 0:
            raise ValueError(f"lengths must be positive, got {v}")
        return v

    @field_validator("box_size")
    @classmethod
    def positive_box(cls, v):
        if min(v) <= 0:
            raise ValueError(f"box sides must be positive, got {v}")
        return v

    @field_validator("jitter")
    @classmethod
    def small_jitter(cls, v):
        if not 0.0 <= v <= 0.25:
            raise ValueError(f"jitter is a fraction of the lattice spacing in [0, 0.25], got {v}")
        return v

    @field_validator("crown")
    @classmethod
    def crown_range(cls, v):
        if not -0.5 < v < 1.0:
            raise ValueError(f"crown must be in (-0.5, 1), got {v}")
        return v

    @field_validator("grid")
    @classmethod
    def nonempty_grid(cls, v):
        if v is not None:
            if not v:
                raise ValueError("parameter grid must not be empty")
            if any(mu < 0 for _, mu in v):
                raise ValueError("friction coefficients must be non-negative")
        return v

    @field_validator("temperature_range", "friction_range")
    @classmethod
    def ordered_range(cls, v):
        if v[0] > v[1]:
            raise ValueError(f"range bounds must be ordered, got {v}")
        return v

    @field_validator("split_fractions")
    @classmethod
    def fractions(cls, v):
        if min(v) < 0 or not math.isclose(sum(v), 1.0) or v[0] <= 0:
            raise ValueError(f"split fractions must be non-negative, sum to 1 and keep a train share, got {v}")
        return v

    @model_validator(mode="after")
    def sector_shape(self) -> "SynthConfig":
        if self.geometry is Geometry.CYLINDRICAL_SECTOR:
            if not 0 < self.inner_radius < self.radius:
                raise ValueError("a cylindrical sector needs 0 < inner_radius < radius")
            if not 0 < self.sector_angle < 2 * math.pi:
                raise ValueError("sector angle must lie in (0, 2*pi)")
        if self.friction_range[0] < 0:
            raise ValueError("friction range must be non-negative")
        return self

    @property
    def n_simulations(self) -> int:
        return len(self.grid) if self.grid is not None else self.grid_size

    @property
    def effective_wear_law(self) -> WearLaw:
        """Wear law of the configured die; the upper die is pressed along -d."""
        return self.wear_law.reversed() if self.die is Die.UPPER else self.wear_law

    @property
    def label(self) -> str:
        return f"{self.geometry}/{self.die}"
