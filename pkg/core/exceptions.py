"""
Exceptions Module

Every failure the pipeline reports on purpose derives from ForgeWearError, so
the command line can turn it into a one-line message and a nonzero exit status.
"""

from typing import Optional, Tuple


class ForgeWearError(Exception):
    """Root of all errors raised by forgewear."""


class MeshParseError(ForgeWearError):
    """Malformed VTK legacy input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"{location}{message}")


class UnsupportedCellError(ForgeWearError):
    """A cell type other than the linear tetrahedron."""


class MeshValidationError(ForgeWearError):
    """A mesh or surface graph violates one of its invariants."""


class UnknownFieldError(ForgeWearError, KeyError):
    """A named scalar field is not attached to the mesh."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NonManifoldError(ForgeWearError):
    """A triangular face is shared by more than two tetrahedra."""


class DimensionError(ForgeWearError, ValueError):
    """Operand shapes are incompatible."""

    @classmethod
    def for_shapes(cls, op: str, left: Tuple[int, ...], right: Tuple[int, ...]) -> "DimensionError":
        return cls(f"{op}: incompatible shapes {left} and {right}")


class TopologyMismatchError(DimensionError):
    """A graph does not have the node count a model or dataset is bound to."""

    def __init__(self, expected: int, found: int, context: str = ""):
        self.expected = expected
        self.found = found
        prefix = f"{context}: " if context else ""
        super().__init__(
            f"{prefix}model is bound to a die topology with {expected} nodes, found {found}"
        )


class TapeError(ForgeWearError):
    """Backward pass requested on something the tape cannot differentiate."""


class InvalidParameterError(ForgeWearError, ValueError):
    """A numeric parameter is outside its allowed range."""


class UndefinedMetricError(ForgeWearError):
    """A metric is not defined for the given data."""


class TrainingDivergedError(ForgeWearError):
    """The loss became NaN or infinite."""

    def __init__(self, epoch: int, graph_id: str, loss: float):
        self.epoch = epoch
        self.graph_id = graph_id
        self.loss = loss
        super().__init__(f"loss became {loss} at epoch {epoch} on graph '{graph_id}'")


class ManifestError(ForgeWearError):
    """A dataset manifest is malformed or inconsistent."""


class CheckpointError(ForgeWearError):
    """A checkpoint file cannot be read or does not match the expected format."""


class InfeasibleResolutionError(ForgeWearError):
    """No lattice satisfies the requested synthetic mesh resolution."""
