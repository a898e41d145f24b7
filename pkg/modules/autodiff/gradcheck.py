"""
Finite-difference gradient checks for the tape.
"""

# external imports
from typing import Callable, Dict, Iterable, Optional, Sequence

import numpy as np

# internal imports
from modules.autodiff.tensor import Tape, Tensor, backward

DEFAULT_STEP = 1e-6
DEFAULT_FLOOR = 1e-4


def central_difference(
    func: Callable[[], float],
    values: np.ndarray,
    step: float = DEFAULT_STEP,
    indices: Optional[Iterable[tuple]] = None,
) -> np.ndarray:
    """
    Central-difference derivative of a scalar function with respect to an array.

    The array is perturbed in place and restored after every evaluation, so
    `func` should read it (typically through the tensors wrapping it).

    Args:
        func: Zero-argument callable returning the scalar
        values: Array the function depends on
        step: Perturbation size
        indices: Entries to differentiate, all of them when omitted
    """
    derivative = np.zeros_like(values)
    for index in indices if indices is not None else np.ndindex(values.shape):
        original = values[index]
        values[index] = original + step
        forward = func()
        values[index] = original - step
        behind = func()
        values[index] = original
        derivative[index] = (forward - behind) / (2.0 * step)
    return derivative


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = DEFAULT_FLOOR) -> float:
    """Max over entries of |a - n| / max(|a|, |n|, floor)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denominator = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / denominator))


def check_gradients(
    loss_fn: Callable[[], Tensor],
    tensors: Sequence[Tensor],
    step: float = DEFAULT_STEP,
    floor: float = DEFAULT_FLOOR,
) -> Dict[int, float]:
    """
    Compare tape gradients of `loss_fn()` against central differences.

    Args:
        loss_fn: Builds a 1x1 loss from `tensors`; must be deterministic
        tensors: Leaves requiring gradients

    Returns:
        Position in `tensors` -> max relative error
    """
    for tensor in tensors:
        tensor.zero_grad()
    with Tape() as tape:
        loss = loss_fn()
    backward(loss, tape)
    analytic = [t.grad if t.grad is not None else np.zeros(t.shape) for t in tensors]

    def _value() -> float:
        return loss_fn().item()

    errors = {}
    for position, tensor in enumerate(tensors):
        numeric = central_difference(_value, tensor.values, step=step)
        errors[position] = relative_error(analytic[position], numeric, floor=floor)
    return errors
