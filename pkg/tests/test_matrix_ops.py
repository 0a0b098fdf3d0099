import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opentag.errors import DegenerateInputError, NumericError, ShapeError
from opentag.numerics import Matrix, ew_max, matmul, sigmoid, softmax_rows

from .oracles import matmul_triple_loop


def test_matmul_identity():
    a = Matrix([[1, 2], [3, 4]])
    assert matmul(a, Matrix.identity(2)) == a


def test_matmul_dot_product():
    out = matmul(Matrix([[1, 2]]), Matrix([[3], [4]]))
    assert out.item() == 11.0


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
    got = matmul(Matrix(a), Matrix(b))
    assert np.abs(got.a - matmul_triple_loop(a, b)).max() < 1e-12


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError, match=r"2x3 @ 2x2"):
        matmul(Matrix.zeros(2, 3), Matrix.zeros(2, 2))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 16),
    k=st.integers(1, 16),
    m=st.integers(1, 16),
    seed=st.integers(0, 2**31),
)
def test_matmul_oracle_random_shapes(n, k, m, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(n, k)), rng.normal(size=(k, m))
    assert np.abs(matmul(Matrix(a), Matrix(b)).a - matmul_triple_loop(a, b)).max() < 1e-12


def test_matrix_rejects_non_finite():
    with pytest.raises(NumericError):
        Matrix([[1.0, np.inf]])


def test_matrix_data_is_row_major():
    m = Matrix([[1, 2], [3, 4]])
    assert m.data.tolist() == [1, 2, 3, 4]
    assert (m.rows, m.cols) == (2, 2)


def test_softmax_uniform_row():
    out = softmax_rows(Matrix([[0.0, 0.0, 0.0]]))
    assert np.allclose(out.a, [[1 / 3, 1 / 3, 1 / 3]], atol=1e-12)


def test_softmax_single_column():
    assert softmax_rows(Matrix([[5.17]])).item() == 1.0


def test_softmax_masked_closed_form():
    # two-way softmax over columns 0 and 1; column 2 hidden
    out = softmax_rows(Matrix([[1.0, 2.0, 3.0]]), mask=[True, True, False])
    e = np.e
    assert np.allclose(out.a, [[1 / (1 + e), e / (1 + e), 0.0]], atol=1e-5)
    assert out.a[0, 2] == 0.0


def test_softmax_fully_masked_is_degenerate():
    with pytest.raises(DegenerateInputError):
        softmax_rows(Matrix([[1.0, 2.0]]), mask=[False, False])


@settings(max_examples=50, deadline=None)
@given(
    rows=st.integers(1, 5),
    cols=st.integers(2, 8),
    seed=st.integers(0, 2**31),
)
def test_softmax_rows_sum_to_one_with_random_mask(rows, cols, seed):
    rng = np.random.default_rng(seed)
    x = Matrix(rng.normal(scale=5.0, size=(rows, cols)))
    mask = rng.random(cols) < 0.7
    if not mask.any():
        mask[0] = True
    out = softmax_rows(x, mask=mask)
    assert np.allclose(out.a.sum(axis=1), 1.0, atol=1e-9)
    assert (out.a[:, ~mask] == 0.0).all()


def test_sigmoid_at_zero():
    assert sigmoid(0.0) == 0.5


def test_sigmoid_saturates():
    assert abs(sigmoid(40.0) - 1.0) < 1e-12
    assert sigmoid(-800.0) == 0.0  # no overflow at extreme inputs


@given(st.floats(-30, 30))
def test_sigmoid_symmetry(x):
    assert abs(sigmoid(x) + sigmoid(-x) - 1.0) < 1e-12


def test_sigmoid_matrix_matches_scalar():
    m = Matrix([[-2.0, 0.0, 3.5]])
    out = sigmoid(m)
    for got, x in zip(out.a[0], m.a[0]):
        assert abs(got - sigmoid(float(x))) < 1e-15


def test_ew_max_idempotent():
    v = Matrix([[1.0, -2.0], [0.5, 3.0]])
    assert ew_max(v, v) == v
