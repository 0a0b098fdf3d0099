"""Dense matrix math with explicit reverse-mode differentiation."""

from .gradcheck import grad_check
from .losses import CLAMP_EPS, asymmetric_loss, bce_loss
from .matrix import Matrix, Scalar
from .ops import (
    add,
    add_scalar,
    col_slice,
    concat_cols,
    ew_max,
    matmul,
    mean_cols,
    mul_scalar,
    scale,
    sigmoid,
    softmax_rows,
    transpose,
)
from .schedule import LrSchedule, lr_at
from .tape import Gradients, GradTape

__all__ = [
    "CLAMP_EPS",
    "Gradients",
    "GradTape",
    "LrSchedule",
    "Matrix",
    "Scalar",
    "add",
    "add_scalar",
    "asymmetric_loss",
    "bce_loss",
    "col_slice",
    "concat_cols",
    "ew_max",
    "grad_check",
    "lr_at",
    "matmul",
    "mean_cols",
    "mul_scalar",
    "scale",
    "sigmoid",
    "softmax_rows",
    "transpose",
]
