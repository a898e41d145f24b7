from modules.train.handlers import TrainingHandler, relative_improvement, train
from modules.train.inference import PredictionResult, predict
from modules.train.losses import log_mse, loss_for, loss_mae, loss_mse
from modules.train.optimizer import Adam, AdamState, adam_step
from modules.train.schemas import EpochRecord, LossKind, StopReason, TrainConfig, TrainReport

__all__ = [
    "Adam",
    "AdamState",
    "EpochRecord",
    "LossKind",
    "PredictionResult",
    "StopReason",
    "TrainConfig",
    "TrainReport",
    "TrainingHandler",
    "adam_step",
    "log_mse",
    "loss_for",
    "loss_mae",
    "loss_mse",
    "predict",
    "relative_improvement",
    "train",
]
