"""Differentiable matrix primitives.

Each primitive validates shapes, computes with numpy, and records a vjp on
the active GradTape (if any). Forward results are plain Matrix values, so the
same functions serve inference (no tape) and training (tape active).
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from ..errors import DegenerateInputError, ShapeError
from .matrix import Matrix
from .tape import active_tape


def _record(output, inputs: tuple, vjp) -> None:
    tape = active_tape()
    if tape is not None:
        tape.record(output, inputs, vjp)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Standard product. a (n,k) @ b (k,m) -> (n,m)."""
    if a.cols != b.rows:
        raise ShapeError(f"matmul shape mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    out = Matrix(a.a @ b.a)

    def vjp(g):
        return g @ b.a.T, a.a.T @ g

    _record(out, (a, b), vjp)
    return out


def add(a: Matrix, b: Matrix) -> Matrix:
    if a.shape != b.shape:
        raise ShapeError(f"add shape mismatch: {a.rows}x{a.cols} + {b.rows}x{b.cols}")
    out = Matrix(a.a + b.a)
    _record(out, (a, b), lambda g: (g, g))
    return out


def scale(x: Matrix, c: float) -> Matrix:
    """Multiply by a non-learnable constant."""
    out = Matrix(x.a * c)
    _record(out, (x,), lambda g: (g * c,))
    return out


def transpose(x: Matrix) -> Matrix:
    out = Matrix(x.a.T)
    _record(out, (x,), lambda g: (g.T,))
    return out


def ew_max(a: Matrix, b: Matrix) -> Matrix:
    """Elementwise maximum; on ties the gradient routes to the first operand."""
    if a.shape != b.shape:
        raise ShapeError(f"ew_max shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    take_a = a.a >= b.a
    out = Matrix(np.where(take_a, a.a, b.a))
    _record(out, (a, b), lambda g: (g * take_a, g * ~take_a))
    return out


def concat_cols(parts: Sequence[Matrix]) -> Matrix:
    if not parts:
        raise ShapeError("concat_cols needs at least one part")
    rows = parts[0].rows
    for p in parts:
        if p.rows != rows:
            raise ShapeError(f"concat_cols row mismatch: {rows} vs {p.rows}")
    out = Matrix(np.hstack([p.a for p in parts]))
    widths = [p.cols for p in parts]

    def vjp(g):
        grads, off = [], 0
        for w in widths:
            grads.append(g[:, off : off + w])
            off += w
        return tuple(grads)

    _record(out, tuple(parts), vjp)
    return out


def col_slice(x: Matrix, start: int, stop: int) -> Matrix:
    if not (0 <= start < stop <= x.cols):
        raise ShapeError(f"col_slice [{start}:{stop}] out of range for {x.rows}x{x.cols}")
    out = Matrix(x.a[:, start:stop])

    def vjp(g):
        full = np.zeros(x.a.shape)
        full[:, start:stop] = g
        return (full,)

    _record(out, (x,), vjp)
    return out


def mean_cols(x: Matrix) -> Matrix:
    """Row-wise mean over the feature axis: (n,m) -> (n,1)."""
    out = Matrix(x.a.mean(axis=1, keepdims=True))
    inv = 1.0 / x.cols
    _record(out, (x,), lambda g: (np.broadcast_to(g * inv, x.a.shape).copy(),))
    return out


def mul_scalar(x: Matrix, s: Matrix) -> Matrix:
    """Multiply every entry by a learnable 1x1 scalar."""
    if s.shape != (1, 1):
        raise ShapeError(f"mul_scalar scalar must be 1x1, got {s.rows}x{s.cols}")
    sv = s.a[0, 0]
    out = Matrix(x.a * sv)
    _record(out, (x, s), lambda g: (g * sv, np.array([[float((g * x.a).sum())]])))
    return out


def add_scalar(x: Matrix, b: Matrix) -> Matrix:
    """Add a learnable 1x1 scalar to every entry."""
    if b.shape != (1, 1):
        raise ShapeError(f"add_scalar scalar must be 1x1, got {b.rows}x{b.cols}")
    out = Matrix(x.a + b.a[0, 0])
    _record(out, (x, b), lambda g: (g, np.array([[float(g.sum())]])))
    return out


def _sigmoid_array(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(x):
    """Logistic function.

    Scalar in, scalar out (never taped); Matrix in, Matrix out (taped).
    Saturates to exactly 0/1 at extreme inputs instead of overflowing.
    """
    if isinstance(x, Matrix):
        p = _sigmoid_array(x.a)
        out = Matrix(p)
        _record(out, (x,), lambda g: (g * p * (1.0 - p),))
        return out
    xf = float(x)
    if xf >= 0:
        return 1.0 / (1.0 + math.exp(-xf))
    ex = math.exp(xf)
    return ex / (1.0 + ex)


def softmax_rows(x: Matrix, mask: Sequence[bool] | np.ndarray | None = None) -> Matrix:
    """Row-wise softmax, stabilized by row-max subtraction.

    mask, when given, is one boolean per column: True entries participate,
    False columns are exactly 0 in the output and receive no gradient.
    """
    if mask is None:
        keep = np.ones(x.cols, dtype=bool)
    else:
        keep = np.asarray(mask, dtype=bool)
        if keep.shape != (x.cols,):
            raise ShapeError(f"softmax mask length {keep.shape} does not match {x.cols} columns")
    if not keep.any():
        raise DegenerateInputError("softmax mask excludes every column")

    sub = x.a[:, keep]
    e = np.exp(sub - sub.max(axis=1, keepdims=True))
    p_sub = e / e.sum(axis=1, keepdims=True)
    full = np.zeros(x.a.shape)
    full[:, keep] = p_sub
    out = Matrix(full)

    def vjp(g):
        g_sub = g[:, keep]
        inner = (p_sub * g_sub).sum(axis=1, keepdims=True)
        d = np.zeros(x.a.shape)
        d[:, keep] = p_sub * (g_sub - inner)
        return (d,)

    _record(out, (x,), vjp)
    return out
