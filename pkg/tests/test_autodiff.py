# external imports
import threading

import numpy as np
import pytest
from scipy import sparse

# internal imports
from core.exceptions import DimensionError, InvalidParameterError, TapeError
from modules.autodiff import (
    Mode,
    Tape,
    Tensor,
    absolute,
    add,
    backward,
    check_gradients,
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

TOLERANCE = 1e-4


def _leaf(rng, shape, offset=0.0):
    return Tensor(rng.normal(size=shape) + offset, requires_grad=True)


def test_matmul_identity(rng):
    b = Tensor(rng.normal(size=(2, 3)))
    np.testing.assert_array_equal(matmul(Tensor(np.eye(2)), b).values, b.values)


def test_transpose_involution(rng):
    a = Tensor(rng.normal(size=(3, 4)))
    np.testing.assert_array_equal(transpose(transpose(a)).values, a.values)


def test_relu_values():
    out = relu(Tensor([[-1.0, 2.0], [0.0, -3.0]]))
    assert out.values.tolist() == [[0.0, 2.0], [0.0, 0.0]]


def test_relu_gradient_positive_branch():
    x = Tensor([[3.0]], requires_grad=True)
    with Tape() as tape:
        loss = total(relu(x))
    backward(loss, tape)
    assert x.grad.tolist() == [[1.0]]


def test_sum_gradient_is_ones():
    w = Tensor(np.arange(4.0).reshape(2, 2), requires_grad=True)
    with Tape() as tape:
        loss = total(w)
    backward(loss, tape)
    np.testing.assert_array_equal(w.grad, np.ones((2, 2)))


def test_dead_relu_branch_has_zero_gradient():
    w = Tensor([[1.0, 2.0], [3.0, 4.0]], requires_grad=True)
    with Tape() as tape:
        loss = total(relu(-w))
    backward(loss, tape)
    np.testing.assert_array_equal(w.grad, np.zeros((2, 2)))


def test_shared_tensor_accumulates_both_paths():
    w = Tensor([[2.0]], requires_grad=True)
    with Tape() as tape:
        loss = add(mul(w, w), scale(w, 3.0))
    backward(loss, tape)
    assert w.grad[0, 0] == 2 * 2.0 + 3.0


def test_backward_clears_tape(rng):
    w = _leaf(rng, (2, 2))
    with Tape() as tape:
        loss = total(square(w))
    assert len(tape) == 2
    backward(loss, tape)
    assert len(tape) == 0


def test_backward_rejects_non_scalar(rng):
    w = _leaf(rng, (2, 2))
    with Tape() as tape:
        out = square(w)
    with pytest.raises(TapeError, match="1x1"):
        backward(out, tape)


def test_backward_rejects_unrecorded_loss(rng):
    w = _leaf(rng, (2, 2))
    loss = total(w)
    with pytest.raises(TapeError):
        backward(loss, Tape())


def test_no_recording_without_gradients(rng):
    with Tape() as tape:
        total(square(Tensor(rng.normal(size=(3, 3)))))
    assert len(tape) == 0


def test_shape_mismatch_raises(rng):
    with pytest.raises(DimensionError):
        matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    with pytest.raises(DimensionError):
        add(Tensor(np.ones((2, 3))), Tensor(np.ones((3, 2))))


def test_tapes_are_thread_local(rng):
    seen = []

    def worker():
        w = Tensor(np.ones((1, 1)), requires_grad=True)
        with Tape() as tape:
            total(w)
        seen.append(len(tape))

    with Tape() as outer:
        thread = threading.Thread(target=worker)
        thread.start()
        thread.join()
    assert seen == [1]
    assert len(outer) == 0


def test_dropout_identity_cases(rng):
    x = Tensor(rng.normal(size=(3, 3)))
    assert dropout(x, 0.0, Mode.TRAIN, rng) is x
    assert dropout(x, 0.7, Mode.EVAL, None) is x


def test_dropout_seeded_mask():
    x = Tensor(np.ones((2, 2)))
    first = dropout(x, 0.5, Mode.TRAIN, np.random.default_rng(7)).values
    second = dropout(x, 0.5, Mode.TRAIN, np.random.default_rng(7)).values
    np.testing.assert_array_equal(first, second)
    assert set(np.unique(first)) <= {0.0, 2.0}


def test_dropout_rejects_bad_probability(rng):
    with pytest.raises(InvalidParameterError):
        dropout(Tensor(np.ones((1, 1))), 1.0, Mode.TRAIN, rng)
    with pytest.raises(InvalidParameterError):
        dropout(Tensor(np.ones((1, 1))), 0.5, Mode.TRAIN, None)


def test_segment_max_values():
    a = Tensor([[1.0, 5.0], [3.0, 2.0], [0.0, -1.0], [4.0, -2.0], [-3.0, 7.0]])
    out = segment_max(a, np.array([0, 2, 3, 5]))
    assert out.values.tolist() == [[3.0, 5.0], [0.0, -1.0], [4.0, 7.0]]


def test_segment_max_rejects_empty_segment():
    with pytest.raises(DimensionError):
        segment_max(Tensor(np.ones((3, 1))), np.array([0, 0, 3]))


def test_segment_max_tie_gradient_goes_to_first_row():
    a = Tensor([[2.0], [2.0], [1.0]], requires_grad=True)
    with Tape() as tape:
        loss = total(row_max(a))
    backward(loss, tape)
    assert a.grad.tolist() == [[1.0], [0.0], [0.0]]


@pytest.mark.parametrize("op", ["matmul", "add_row", "add_col", "sub", "mul", "transpose", "concat"])
def test_binary_gradients(rng, op):
    a = _leaf(rng, (4, 3))
    builders = {
        "matmul": (lambda: matmul(a, b), _leaf(rng, (3, 2))),
        "add_row": (lambda: add(a, b), _leaf(rng, (1, 3))),
        "add_col": (lambda: add(b, a), _leaf(rng, (4, 1))),
        "sub": (lambda: sub(a, b), _leaf(rng, (4, 3))),
        "mul": (lambda: mul(a, b), _leaf(rng, (1, 3))),
        "transpose": (lambda: matmul(transpose(a), b), _leaf(rng, (4, 2))),
        "concat": (lambda: concat_cols([a, b, a]), _leaf(rng, (4, 2))),
    }
    build, b = builders[op]
    weights = Tensor(rng.normal(size=build().shape))
    errors = check_gradients(lambda: total(mul(build(), weights)), [a, b])
    assert max(errors.values()) < TOLERANCE


@pytest.mark.parametrize("op", ["relu", "square", "absolute", "mean", "row_mean", "row_max", "scale"])
def test_unary_gradients(rng, op):
    # Entries kept away from 0 so relu and abs are smooth at the sample points
    values = rng.uniform(0.1, 1.0, size=(5, 3)) * rng.choice([-1.0, 1.0], size=(5, 3))
    a = Tensor(values, requires_grad=True)
    builders = {
        "relu": lambda: total(relu(a)),
        "square": lambda: total(square(a)),
        "absolute": lambda: total(absolute(a)),
        "mean": lambda: mean(square(a)),
        "row_mean": lambda: total(square(row_mean(a))),
        "row_max": lambda: total(square(row_max(a))),
        "scale": lambda: total(square(scale(a, -2.5))),
    }
    errors = check_gradients(builders[op], [a])
    assert errors[0] < TOLERANCE


def test_gather_and_segment_gradients(rng):
    a = Tensor(rng.permutation(24).reshape(8, 3) / 7.0, requires_grad=True)
    index = np.array([0, 3, 3, 1, 7, 7, 7, 2])
    weights = Tensor(rng.normal(size=(3, 3)))

    def loss():
        gathered = gather_rows(a, index)
        return total(mul(segment_max(gathered, np.array([0, 3, 5, 8])), weights))

    errors = check_gradients(loss, [a])
    assert errors[0] < TOLERANCE


def test_spmm_gradient(rng):
    matrix = sparse.random(6, 5, density=0.4, random_state=3, format="csr")
    a = _leaf(rng, (5, 2))
    np.testing.assert_allclose(spmm(matrix, a).values, matrix.toarray() @ a.values)
    errors = check_gradients(lambda: total(square(spmm(matrix, a))), [a])
    assert errors[0] < TOLERANCE


def test_dropout_gradient_uses_mask():
    x = Tensor(np.ones((3, 3)), requires_grad=True)
    with Tape() as tape:
        out = dropout(x, 0.5, Mode.TRAIN, np.random.default_rng(11))
        loss = total(out)
    backward(loss, tape)
    np.testing.assert_array_equal(x.grad, out.values)
