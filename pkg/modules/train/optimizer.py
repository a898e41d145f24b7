# external imports
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

# internal imports
from core.exceptions import DimensionError
from modules.autodiff import Tensor
from modules.train.schemas import TrainConfig


@dataclass
class AdamState:
    """Per-parameter first/second moments and the shared timestep."""
    step: int = 0
    exp_avg: Dict[str, np.ndarray] = field(default_factory=dict)
    exp_avg_sq: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
    config: TrainConfig,
) -> AdamState:
    """
    One Adam update, in place on `params`.

    The weight decay is added to the gradient (L2 penalty, g <- g + wd * w)
    before the moment updates; parameters without a gradient are skipped.

    Raises:
        DimensionError: a gradient or stored moment no longer matches its parameter
    """
    state.step += 1
    t = state.step
    beta1, beta2 = config.beta1, config.beta2
    bias_correction1 = 1.0 - beta1 ** t
    bias_correction2 = 1.0 - beta2 ** t

    for name, weight in params.items():
        grad = grads.get(name)
        if grad is None:
            continue
        if grad.shape != weight.shape:
            raise DimensionError.for_shapes(f"adam gradient of {name}", weight.shape, grad.shape)
        if config.weight_decay != 0:
            grad = grad + config.weight_decay * weight

        if name not in state.exp_avg:
            state.exp_avg[name] = np.zeros_like(weight)
            state.exp_avg_sq[name] = np.zeros_like(weight)
        exp_avg, exp_avg_sq = state.exp_avg[name], state.exp_avg_sq[name]
        if exp_avg.shape != weight.shape:
            raise DimensionError.for_shapes(f"adam state of {name}", weight.shape, exp_avg.shape)

        exp_avg *= beta1
        exp_avg += (1.0 - beta1) * grad
        exp_avg_sq *= beta2
        exp_avg_sq += (1.0 - beta2) * grad * grad

        m_hat = exp_avg / bias_correction1
        v_hat = exp_avg_sq / bias_correction2
        weight -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return state


class Adam:
    """
    Adam over a model's named parameter tensors.

    Example:
        >>> optimizer = Adam(model.parameters(), config)
        >>> optimizer.step()
    """

    def __init__(self, params: Mapping[str, Tensor], config: TrainConfig) -> None:
        self.params = dict(params)
        self.config = config
        self.state = AdamState()

    def step(self) -> None:
        adam_step(
            {name: t.values for name, t in self.params.items()},
            {name: t.grad for name, t in self.params.items()},
            self.state,
            self.config,
        )

    def zero_grad(self) -> None:
        for tensor in self.params.values():
            tensor.zero_grad()
