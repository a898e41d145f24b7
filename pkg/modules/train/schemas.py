# external imports
import io
import math
from enum import Enum
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field, field_validator

# internal imports
from core.config import settings
from core.constants import CURVE_COLUMNS


class LossKind(Enum):
    """Loss used for backpropagation."""
    MSE = "mse"
    MAE = "mae"

    def __str__(self) -> str:
        return self.value


class StopReason(Enum):
    EPOCHS_EXHAUSTED = "epochs_exhausted"
    PLATEAU = "plateau"

    def __str__(self) -> str:
        return self.value


class TrainConfig(BaseModel):
    """Optimizer and schedule settings; defaults come from Settings."""
    learning_rate: float = Field(default_factory=lambda: settings.learning_rate)
    weight_decay: float = Field(default_factory=lambda: settings.weight_decay)
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = Field(default_factory=lambda: settings.epochs)
    loss: LossKind = LossKind.MSE
    plateau_check_interval: int = Field(default_factory=lambda: settings.plateau_check_interval)
    plateau_relative_tolerance: Optional[float] = Field(
        default_factory=lambda: settings.plateau_relative_tolerance
    )
    seed: int = Field(default_factory=lambda: settings.seed)
    log_every: int = 10

    @field_validator("learning_rate")
    @classmethod
    def positive_rate(cls, v):
        if not v > 0:
            raise ValueError(f"learning_rate must be positive, got {v}")
        return v

    @field_validator("weight_decay")
    @classmethod
    def nonnegative_decay(cls, v):
        if v < 0:
            raise ValueError(f"weight_decay must be non-negative, got {v}")
        return v

    @field_validator("beta1", "beta2")
    @classmethod
    def beta_range(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"Adam betas must be in [0, 1), got {v}")
        return v

    @field_validator("epochs", "plateau_check_interval", "log_every")
    @classmethod
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v

    @field_validator("loss", mode="before")
    @classmethod
    def parse_loss(cls, v):
        return LossKind(v.lower()) if isinstance(v, str) else v

    @field_validator("plateau_relative_tolerance")
    @classmethod
    def tolerance_sign(cls, v):
        if v is not None and (math.isnan(v) or v < 0):
            raise ValueError(f"plateau tolerance must be non-negative, got {v}")
        return v


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    train_log_mse: float
    val_mae: float
    val_mse: float
    seconds: float


class TrainReport(BaseModel):
    """Learning curve and outcome of one training run."""
    config: TrainConfig
    epochs: List[EpochRecord] = Field(default_factory=list)
    stop_reason: StopReason = StopReason.EPOCHS_EXHAUSTED
    final_metrics: Dict[str, Optional[float]] = Field(default_factory=dict)

    @property
    def completed_epochs(self) -> int:
        return len(self.epochs)

    @property
    def train_losses(self) -> List[float]:
        return [r.train_loss for r in self.epochs]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.epochs], columns=list(CURVE_COLUMNS))

    def curve_csv(self, include_timing: bool = True) -> str:
        """Learning curve as CSV text with the header epoch,train_loss,...,seconds."""
        frame = self.to_frame()
        if not include_timing:
            frame = frame.drop(columns=["seconds"])
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format="%.17g", na_rep="nan", lineterminator="\n")
        return buffer.getvalue()
