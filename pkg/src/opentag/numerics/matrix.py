"""Dense 2-D float64 value type used by every differentiable primitive.

A Matrix owns a C-contiguous, read-only float64 array. Read-only is the point:
matrices are value-semantic, so they can be shared across threads and used as
identity keys on a gradient tape without aliasing surprises. Every public
constructor rejects NaN/Inf.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..errors import NumericError, ShapeError


class Matrix:
    """rows x cols of float64, row-major."""

    __slots__ = ("a",)

    def __init__(self, array: np.ndarray | Sequence[Sequence[float]]):
        a = np.ascontiguousarray(array, dtype=np.float64)
        if a.ndim != 2:
            raise ShapeError(f"Matrix requires a 2-D array, got ndim={a.ndim}")
        if not np.isfinite(a).all():
            raise NumericError("Matrix entries must be finite (found NaN or Inf)")
        if not a.flags.owndata:
            a = a.copy()
        a.setflags(write=False)
        self.a = a

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @classmethod
    def scalar(cls, value: float) -> "Matrix":
        """1x1 matrix, used for learnable scalars that live on the tape."""
        return cls(np.array([[float(value)]]))

    @classmethod
    def row(cls, values: Sequence[float]) -> "Matrix":
        return cls(np.asarray(values, dtype=np.float64).reshape(1, -1))

    @classmethod
    def column(cls, values: Sequence[float]) -> "Matrix":
        return cls(np.asarray(values, dtype=np.float64).reshape(-1, 1))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape  # type: ignore[return-value]

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the entries."""
        return self.a.reshape(-1)

    def item(self) -> float:
        if self.a.size != 1:
            raise ShapeError(f"item() requires a 1x1 matrix, got {self.rows}x{self.cols}")
        return float(self.a[0, 0])

    def tolist(self) -> list[list[float]]:
        return self.a.tolist()

    def allclose(self, other: "Matrix", atol: float = 1e-12) -> bool:
        return self.shape == other.shape and bool(np.allclose(self.a, other.a, rtol=0.0, atol=atol))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:  # identity hash; values are mutable-free but large
        return id(self)

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


class Scalar(float):
    """A float with object identity.

    Loss functions return Scalar so the tape can key the final output of a
    forward pass the same way it keys Matrix outputs. Behaves as a plain float
    everywhere else.
    """

    __slots__ = ()
