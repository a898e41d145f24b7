"""
Tensor and Tape Module

Dense 2-D float64 tensors and the gradient tape that records the operations
applied to them. A tape is activated with `with Tape() as tape:`; operations on
tensors requiring gradients are appended to the innermost active tape of the
current thread, so distinct threads can train distinct model replicas.

Classes:
    Tensor: 2-D array with an optional gradient
    TapeNode: one recorded operation
    Tape: ordered list of recorded operations
"""

# external imports
import threading
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

# internal imports
from core.exceptions import DimensionError, TapeError

BackwardFn = Callable[[np.ndarray, Tuple[bool, ...]], Sequence[Optional[np.ndarray]]]

_local = threading.local()


def _stack() -> List["Tape"]:
    if not hasattr(_local, "tapes"):
        _local.tapes = []
    return _local.tapes


def active_tape() -> Optional["Tape"]:
    """Innermost tape entered on this thread, if any."""
    stack = _stack()
    return stack[-1] if stack else None


class Tensor:
    """
    Row-major 2-D float64 array taking part in reverse-mode differentiation.

    Attributes:
        values: (rows, cols) float64 array
        requires_grad: whether gradients are accumulated into `grad`
        grad: same-shape gradient, None until a backward pass reaches the tensor
        tape_node: operation that produced this tensor on the active tape
    """

    __slots__ = ("values", "requires_grad", "grad", "tape_node", "name")

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None):
        array = np.array(values, dtype=np.float64)
        if array.ndim == 0:
            array = array.reshape(1, 1)
        if array.ndim != 2:
            raise DimensionError(f"tensors are 2-D, got an array of shape {array.shape}")
        self.values = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.tape_node: Optional["TapeNode"] = None
        self.name = name

    @classmethod
    def _wrap(cls, values: np.ndarray, requires_grad: bool = False) -> "Tensor":
        tensor = cls.__new__(cls)
        tensor.values = values
        tensor.requires_grad = requires_grad
        tensor.grad = None
        tensor.tape_node = None
        tensor.name = None
        return tensor

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate(self, gradient: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if gradient.shape != self.values.shape:
            raise DimensionError.for_shapes("gradient accumulation", self.values.shape, gradient.shape)
        if self.grad is None:
            self.grad = np.array(gradient, dtype=np.float64)
        else:
            self.grad += gradient

    def item(self) -> float:
        if self.values.size != 1:
            raise DimensionError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.values[0, 0])

    def numpy(self) -> np.ndarray:
        return self.values

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # Operator sugar, resolved lazily to keep ops importing this module
    def __matmul__(self, other: "Tensor") -> "Tensor":
        from modules.autodiff.ops import matmul
        return matmul(self, other)

    def __add__(self, other: "Tensor") -> "Tensor":
        from modules.autodiff.ops import add
        return add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        from modules.autodiff.ops import sub
        return sub(self, other)

    def __mul__(self, other) -> "Tensor":
        from modules.autodiff.ops import mul, scale
        if isinstance(other, Tensor):
            return mul(self, other)
        return scale(self, float(other))

    def __rmul__(self, other) -> "Tensor":
        from modules.autodiff.ops import scale
        return scale(self, float(other))

    def __neg__(self) -> "Tensor":
        from modules.autodiff.ops import scale
        return scale(self, -1.0)

    @property
    def T(self) -> "Tensor":
        from modules.autodiff.ops import transpose
        return transpose(self)


class TapeNode:
    """One recorded operation: inputs, output and the rule mapping the output
    gradient to input gradients."""

    __slots__ = ("op", "inputs", "output", "backward", "tape")

    def __init__(self, op: str, inputs: Tuple[Tensor, ...], output: Tensor, backward: BackwardFn, tape: "Tape"):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.backward = backward
        self.tape = tape


class Tape:
    """
    Ordered record of operations; inputs of every node precede it.

    Example:
        >>> with Tape() as tape:
        ...     loss = total(relu(w))
        >>> backward(loss, tape)
    """

    def __init__(self) -> None:
        self.nodes: List[TapeNode] = []

    def __enter__(self) -> "Tape":
        _stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, op: str, inputs: Tuple[Tensor, ...], output: Tensor, backward: BackwardFn) -> None:
        node = TapeNode(op, inputs, output, backward, self)
        output.tape_node = node
        self.nodes.append(node)

    def clear(self) -> None:
        for node in self.nodes:
            node.output.tape_node = None
        self.nodes = []


def backward(loss: Tensor, tape: Optional[Tape] = None) -> None:
    """
    Populate `.grad` on every tensor requiring gradients that the loss depends on.

    Gradients are accumulated additively (a tensor used twice receives the sum of
    both paths) and the tape is cleared afterwards.

    Raises:
        TapeError: the loss is not 1x1 or was not recorded on the tape
    """
    tape = tape if tape is not None else active_tape()
    if loss.shape != (1, 1):
        raise TapeError(f"backward needs a 1x1 loss, got shape {loss.shape}")
    if tape is None or loss.tape_node is None or loss.tape_node.tape is not tape:
        raise TapeError("loss was not recorded on the given tape")

    loss.accumulate(np.ones((1, 1)))
    for node in reversed(tape.nodes):
        upstream = node.output.grad
        if upstream is None:
            continue
        needs = tuple(t.requires_grad for t in node.inputs)
        grads = node.backward(upstream, needs)
        for tensor, gradient, need in zip(node.inputs, grads, needs):
            if need and gradient is not None:
                tensor.accumulate(gradient)
    tape.clear()
