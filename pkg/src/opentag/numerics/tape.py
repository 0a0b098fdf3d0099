"""Minimal reverse-mode tape.

Primitives record (output, inputs, vjp) triples while a GradTape is active.
Backward walks the recordings in exact reverse order, seeding the requested
output with an upstream gradient and accumulating into each input additively,
which handles fan-out (one value feeding several consumers) for free.

Values are identified by object identity, which is safe because Matrix is
immutable and every primitive returns a fresh object. The tape holds strong
references to everything it recorded, so ids cannot be recycled while the
tape is alive.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from ..errors import NumericError
from .matrix import Matrix, Scalar

# A vjp maps the gradient at the output to a tuple of gradients aligned with
# the recorded inputs; None marks an input that receives no gradient.
Vjp = Callable[[Union[np.ndarray, float]], tuple]

_ACTIVE: "GradTape | None" = None


def active_tape() -> "GradTape | None":
    return _ACTIVE


class GradTape:
    """Ordered record of primitive applications for reverse accumulation."""

    def __init__(self) -> None:
        self._entries: list[tuple[object, tuple, Vjp]] = []

    def __enter__(self) -> "GradTape":
        global _ACTIVE
        if _ACTIVE is not None:
            raise RuntimeError("a GradTape is already active; nesting is not supported")
        _ACTIVE = self
        return self

    def __exit__(self, *exc) -> None:
        global _ACTIVE
        _ACTIVE = None

    def __len__(self) -> int:
        return len(self._entries)

    def record(self, output: object, inputs: tuple, vjp: Vjp) -> None:
        self._entries.append((output, inputs, vjp))

    def gradients(self, output: Matrix | Scalar, seed: np.ndarray | float = 1.0) -> "Gradients":
        """Reverse-accumulate d(output)/d(everything recorded), seeded with `seed`."""
        if isinstance(output, Matrix):
            seed_arr = np.broadcast_to(np.asarray(seed, dtype=np.float64), output.a.shape).copy()
        else:
            seed_arr = float(seed)
        table: dict[int, np.ndarray | float] = {id(output): seed_arr}
        holders: dict[int, object] = {id(output): output}
        for out, inputs, vjp in reversed(self._entries):
            g_out = table.get(id(out))
            if g_out is None:
                continue
            for inp, g_in in zip(inputs, vjp(g_out)):
                if g_in is None:
                    continue
                key = id(inp)
                if key in table:
                    table[key] = table[key] + g_in
                else:
                    table[key] = g_in
                    holders[key] = inp
        return Gradients(table, holders)


class Gradients:
    """Result of a backward pass; lookup by the forward-pass value objects."""

    def __init__(self, table: dict[int, np.ndarray | float], holders: dict[int, object]):
        self._table = table
        self._holders = holders  # keeps ids stable

    def wrt(self, value: Matrix) -> np.ndarray:
        """Gradient array for `value` (zeros when nothing flowed into it)."""
        g = self._table.get(id(value))
        if g is None:
            return np.zeros(value.a.shape)
        g = np.asarray(g, dtype=np.float64)
        if not np.isfinite(g).all():
            raise NumericError("non-finite gradient encountered during backward")
        return g

    def has(self, value: object) -> bool:
        return id(value) in self._table
