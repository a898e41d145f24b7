"""
Differentiable primitives.

Each function computes its forward value with numpy and, when a tape is active
and an input requires gradients, records a backward rule on the tape. Forward
values never depend on the requires_grad flags.
"""

# external imports
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

# internal imports
from core.exceptions import DimensionError, InvalidParameterError
from modules.autodiff.tensor import BackwardFn, Tensor, active_tape


class Mode(Enum):
    """Forward-pass mode; dropout is only active in TRAIN."""
    TRAIN = "train"
    EVAL = "eval"

    def __str__(self) -> str:
        return self.value


def _result(values: np.ndarray, inputs: Tuple[Tensor, ...], backward: BackwardFn, op: str) -> Tensor:
    tape = active_tape()
    if tape is None or not any(t.requires_grad for t in inputs):
        return Tensor._wrap(values)
    out = Tensor._wrap(values, requires_grad=True)
    tape.record(op, inputs, out, backward)
    return out


def _broadcast_shape(op: str, left: Tuple[int, int], right: Tuple[int, int]) -> Tuple[int, int]:
    # Same shape, a (1, n) row, or an (m, 1) column against (m, n)
    rows = left[0] if right[0] in (1, left[0]) else (right[0] if left[0] == 1 else None)
    cols = left[1] if right[1] in (1, left[1]) else (right[1] if left[1] == 1 else None)
    if rows is None or cols is None:
        raise DimensionError.for_shapes(op, left, right)
    return rows, cols


def _unbroadcast(gradient: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    if shape[0] == 1 and gradient.shape[0] != 1:
        gradient = gradient.sum(axis=0, keepdims=True)
    if shape[1] == 1 and gradient.shape[1] != 1:
        gradient = gradient.sum(axis=1, keepdims=True)
    return gradient


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape[1] != b.shape[0]:
        raise DimensionError.for_shapes("matmul", a.shape, b.shape)
    av, bv = a.values, b.values

    def backward(g, needs):
        return (g @ bv.T if needs[0] else None, av.T @ g if needs[1] else None)

    return _result(av @ bv, (a, b), backward, "matmul")


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape("add", a.shape, b.shape)
    sa, sb = a.shape, b.shape

    def backward(g, needs):
        return (_unbroadcast(g, sa) if needs[0] else None, _unbroadcast(g, sb) if needs[1] else None)

    return _result(a.values + b.values, (a, b), backward, "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape("sub", a.shape, b.shape)
    sa, sb = a.shape, b.shape

    def backward(g, needs):
        return (_unbroadcast(g, sa) if needs[0] else None, -_unbroadcast(g, sb) if needs[1] else None)

    return _result(a.values - b.values, (a, b), backward, "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise product."""
    _broadcast_shape("mul", a.shape, b.shape)
    av, bv = a.values, b.values

    def backward(g, needs):
        return (
            _unbroadcast(g * bv, av.shape) if needs[0] else None,
            _unbroadcast(g * av, bv.shape) if needs[1] else None,
        )

    return _result(av * bv, (a, b), backward, "mul")


def scale(a: Tensor, factor: float) -> Tensor:
    def backward(g, needs):
        return (g * factor,)

    return _result(a.values * factor, (a,), backward, "scale")


def transpose(a: Tensor) -> Tensor:
    def backward(g, needs):
        return (g.T,)

    return _result(a.values.T, (a,), backward, "transpose")


def concat_cols(tensors: Sequence[Tensor]) -> Tensor:
    tensors = tuple(tensors)
    rows = tensors[0].shape[0]
    for t in tensors[1:]:
        if t.shape[0] != rows:
            raise DimensionError.for_shapes("concat_cols", tensors[0].shape, t.shape)
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def backward(g, needs):
        return tuple(g[:, bounds[i]:bounds[i + 1]] if needs[i] else None for i in range(len(tensors)))

    return _result(np.hstack([t.values for t in tensors]), tensors, backward, "concat_cols")


def row_mean(a: Tensor) -> Tensor:
    """Mean over rows: (m, n) -> (1, n)."""
    m = a.shape[0]

    def backward(g, needs):
        return (np.broadcast_to(g / m, a.shape),)

    return _result(a.values.mean(axis=0, keepdims=True), (a,), backward, "row_mean")


def segment_max(a: Tensor, indptr: np.ndarray) -> Tensor:
    """
    Columnwise max over contiguous row segments [indptr[s], indptr[s+1]).

    The gradient of each output entry flows to the first row attaining the max.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    counts = np.diff(indptr)
    if indptr[0] != 0 or indptr[-1] != a.shape[0] or (counts <= 0).any():
        raise DimensionError(
            f"segment_max: segments must be non-empty and cover all {a.shape[0]} rows"
        )
    av = a.values
    starts = indptr[:-1]
    out = np.maximum.reduceat(av, starts, axis=0)

    def backward(g, needs):
        segment_of_row = np.repeat(np.arange(counts.size), counts)
        rows = np.arange(av.shape[0])[:, None]
        candidate = np.where(av == out[segment_of_row], rows, av.shape[0])
        winner = np.minimum.reduceat(candidate, starts, axis=0)
        grad = np.zeros_like(av)
        grad[winner, np.arange(av.shape[1])[None, :]] = g
        return (grad,)

    return _result(out, (a,), backward, "segment_max")


def row_max(a: Tensor) -> Tensor:
    """Max over rows: (m, n) -> (1, n)."""
    return segment_max(a, np.array([0, a.shape[0]]))


def gather_rows(a: Tensor, index: np.ndarray) -> Tensor:
    """Select rows by index (repetitions allowed): out[r] = a[index[r]]."""
    index = np.asarray(index, dtype=np.int64).reshape(-1)
    if index.size and (index.min() < 0 or index.max() >= a.shape[0]):
        raise DimensionError(f"gather_rows: index outside [0, {a.shape[0]})")

    def backward(g, needs):
        grad = np.zeros(a.shape)
        np.add.at(grad, index, g)
        return (grad,)

    return _result(a.values[index], (a,), backward, "gather_rows")


def spmm(matrix: sparse.spmatrix, a: Tensor) -> Tensor:
    """Constant sparse matrix times tensor; the matrix carries no gradient."""
    if matrix.shape[1] != a.shape[0]:
        raise DimensionError.for_shapes("spmm", matrix.shape, a.shape)
    transposed = matrix.T.tocsr()

    def backward(g, needs):
        return (np.asarray(transposed @ g),)

    return _result(np.asarray(matrix @ a.values), (a,), backward, "spmm")


def relu(a: Tensor) -> Tensor:
    av = a.values

    def backward(g, needs):
        return (g * (av > 0),)

    return _result(np.maximum(av, 0.0), (a,), backward, "relu")


def dropout(a: Tensor, p: float, mode: Mode, rng: Optional[np.random.Generator]) -> Tensor:
    """
    Inverted dropout: in TRAIN mode each entry is zeroed with probability p and
    survivors are scaled by 1/(1-p); EVAL mode is the identity.
    """
    if not 0.0 <= p < 1.0:
        raise InvalidParameterError(f"dropout probability must be in [0, 1), got {p}")
    if mode is Mode.EVAL or p == 0.0:
        return a
    if rng is None:
        raise InvalidParameterError("dropout in train mode needs a seeded generator")
    mask = (rng.random(a.shape) >= p) / (1.0 - p)

    def backward(g, needs):
        return (g * mask,)

    return _result(a.values * mask, (a,), backward, "dropout")


def total(a: Tensor) -> Tensor:
    """Sum of all entries as a 1x1 tensor."""
    def backward(g, needs):
        return (np.full(a.shape, g[0, 0]),)

    return _result(np.array([[a.values.sum()]]), (a,), backward, "total")


def mean(a: Tensor) -> Tensor:
    """Mean of all entries as a 1x1 tensor."""
    size = a.values.size

    def backward(g, needs):
        return (np.full(a.shape, g[0, 0] / size),)

    return _result(np.array([[a.values.mean()]]), (a,), backward, "mean")


def absolute(a: Tensor) -> Tensor:
    av = a.values

    def backward(g, needs):
        return (g * np.sign(av),)

    return _result(np.abs(av), (a,), backward, "absolute")


def square(a: Tensor) -> Tensor:
    av = a.values

    def backward(g, needs):
        return (2.0 * av * g,)

    return _result(av * av, (a,), backward, "square")
