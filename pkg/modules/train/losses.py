# external imports
import numpy as np

# internal imports
from core.exceptions import DimensionError
from modules.autodiff import Tensor, absolute, mean, square, sub
from modules.train.schemas import LossKind


def _residual(pred: Tensor, target: Tensor) -> Tensor:
    if pred.shape != target.shape:
        raise DimensionError.for_shapes("loss", pred.shape, target.shape)
    return sub(pred, target)


def loss_mae(pred: Tensor, target: Tensor) -> Tensor:
    """(1/N) sum |pred - target| as a 1x1 tensor."""
    return mean(absolute(_residual(pred, target)))


def loss_mse(pred: Tensor, target: Tensor) -> Tensor:
    """(1/N) sum (pred - target)^2 as a 1x1 tensor."""
    return mean(square(_residual(pred, target)))


def loss_for(kind: LossKind):
    return {LossKind.MAE: loss_mae, LossKind.MSE: loss_mse}[kind]


def log_mse(mse: float) -> float:
    """log10 of an MSE value, floored at the smallest positive double."""
    return float(np.log10(max(mse, np.finfo(np.float64).tiny)))
