"""
Base Definitions for Surrogate Models

Defines the interface every architecture implements so training, prediction
and checkpoints stay architecture-agnostic.
"""

# external imports
from abc import ABC, abstractmethod
from typing import Dict, List, Optional

import numpy as np

# internal imports
from core.exceptions import CheckpointError, TopologyMismatchError
from modules.autodiff import Mode, Tensor
from modules.nn.graph import GraphStructure
from modules.nn.layers import Layer
from modules.nn.schemas import ModelSpec


class BaseGraphModel(ABC):
    """
    Abstract base class for the wear surrogates.

    Subclasses register their layers in `self.layers` (in forward order) and
    implement `forward`.

    Args:
        spec: Architecture description the model is built from
    """

    def __init__(self, spec: ModelSpec) -> None:
        self.spec = spec
        self.layers: List[Layer] = []

    @property
    def node_count(self) -> Optional[int]:
        return self.spec.node_count

    def parameters(self) -> Dict[str, Tensor]:
        """Qualified name -> tensor, in layer order."""
        return {
            f"{layer.name}.{key}": tensor
            for layer in self.layers
            for key, tensor in layer.params.items()
        }

    def init_params(self, rng: np.random.Generator) -> None:
        for layer in self.layers:
            layer.init_params(rng)

    def zero_grad(self) -> None:
        for tensor in self.parameters().values():
            tensor.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: tensor.values.copy() for name, tensor in self.parameters().items()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """
        Copy arrays into the parameters.

        Raises:
            CheckpointError: missing, unexpected or wrongly shaped arrays
        """
        params = self.parameters()
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            raise CheckpointError(
                f"parameter names do not match the architecture (missing {missing}, unexpected {unexpected})"
            )
        for name, tensor in params.items():
            array = np.asarray(state[name], dtype=np.float64)
            if array.shape != tensor.shape:
                raise CheckpointError(f"{name}: stored shape {array.shape}, expected {tensor.shape}")
            tensor.values[...] = array

    def check_topology(self, structure: GraphStructure) -> None:
        if self.node_count is not None and self.spec.variant.needs_node_count:
            if structure.n_nodes != self.node_count:
                raise TopologyMismatchError(self.node_count, structure.n_nodes)

    @abstractmethod
    def forward(
        self,
        features: Tensor,
        structure: GraphStructure,
        mode: Mode = Mode.EVAL,
        rng: Optional[np.random.Generator] = None,
    ) -> Tensor:
        """Map (N x 5) node features to (N x 1) nonnegative wear."""
        ...
