from modules.autodiff.gradcheck import central_difference, check_gradients, relative_error
from modules.autodiff.ops import (
    Mode,
    absolute,
    add,
    concat_cols,
    dropout,
    gather_rows,
    matmul,
    mean,
    mul,
    relu,
    row_max,
    row_mean,
    scale,
    segment_max,
    spmm,
    square,
    sub,
    total,
    transpose,
)
from modules.autodiff.tensor import Tape, TapeNode, Tensor, active_tape, backward

__all__ = [
    "Mode",
    "Tape",
    "TapeNode",
    "Tensor",
    "absolute",
    "active_tape",
    "add",
    "backward",
    "central_difference",
    "check_gradients",
    "concat_cols",
    "dropout",
    "gather_rows",
    "matmul",
    "mean",
    "mul",
    "relu",
    "relative_error",
    "row_max",
    "row_mean",
    "scale",
    "segment_max",
    "spmm",
    "square",
    "sub",
    "total",
    "transpose",
]
