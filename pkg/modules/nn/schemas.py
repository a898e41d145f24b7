# external imports
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

# internal imports
from core.config import settings
from core.constants import LAYER_WIDTHS


class Variant(Enum):
    """Model architectures.

    Example:
        >>> Variant.from_name("edgeconv-l")
        <Variant.EDGE_CONV_LINEAR: 'edge_conv_linear'>
    """
    GRAPH_CONV_BASELINE = "graph_conv_baseline"
    POINTNET_BASELINE = "pointnet_baseline"
    EDGE_CONV_LINEAR = "edge_conv_linear"
    SAGE_CONV_LINEAR = "sage_conv_linear"

    def __str__(self) -> str:
        return self.value

    @property
    def alias(self) -> str:
        return _ALIASES[self]

    @property
    def needs_node_count(self) -> bool:
        return self in (Variant.EDGE_CONV_LINEAR, Variant.SAGE_CONV_LINEAR)

    @classmethod
    def from_name(cls, name: str) -> "Variant":
        """Accept either the canonical value or the command-line alias."""
        for variant, alias in _ALIASES.items():
            if name in (variant.value, alias):
                return variant
        raise ValueError(f"unknown model variant '{name}'. Supported: {VARIANT_ALIASES}")


_ALIASES: Dict[Variant, str] = {
    Variant.GRAPH_CONV_BASELINE: "graphconv",
    Variant.POINTNET_BASELINE: "pointnet",
    Variant.EDGE_CONV_LINEAR: "edgeconv-l",
    Variant.SAGE_CONV_LINEAR: "sageconv-l",
}

VARIANT_ALIASES = list(_ALIASES.values())  # Command-line spellings


class DropoutPlacement(Enum):
    """Where dropout sits around the node-linear layer."""
    BOTH = "both"
    BEFORE = "before"

    def __str__(self) -> str:
        return self.value


class ModelSpec(BaseModel):
    """Everything needed to rebuild a model besides its trained weights."""
    variant: Variant
    widths: Tuple[int, ...] = LAYER_WIDTHS
    dropout_p: float = Field(default_factory=lambda: settings.dropout_p)
    node_count: Optional[int] = None
    seed: int = Field(default_factory=lambda: settings.seed)
    dropout_placement: DropoutPlacement = DropoutPlacement.BOTH

    @field_validator("variant", mode="before")
    @classmethod
    def parse_variant(cls, v):
        if isinstance(v, str):
            return Variant.from_name(v)
        return v

    @field_validator("widths")
    @classmethod
    def fixed_widths(cls, v):
        if tuple(v) != LAYER_WIDTHS:
            raise ValueError(f"layer widths are fixed to {LAYER_WIDTHS}, got {tuple(v)}")
        return tuple(v)

    @field_validator("dropout_p")
    @classmethod
    def probability(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"dropout_p must be in [0, 1), got {v}")
        return v

    @field_validator("node_count")
    @classmethod
    def positive_nodes(cls, v):
        if v is not None and v < 1:
            raise ValueError(f"node_count must be at least 1, got {v}")
        return v

    @model_validator(mode="after")
    def linear_variants_need_nodes(self) -> "ModelSpec":
        if self.variant.needs_node_count and self.node_count is None:
            raise ValueError(f"{self.variant} is bound to one topology and needs node_count")
        return self
