"""Finite-difference validation of tape gradients.

The function under test takes a name -> Matrix mapping and returns a scalar
loss built from taped primitives. Analytic gradients come from one taped run;
numeric ones from central differences with the perturbed parameter swapped in
(matrices are immutable, so perturbation builds a fresh mapping).
"""

from __future__ import annotations

from collections.abc import Callable, Mapping

from ..errors import ConfigError, NumericError
from .matrix import Matrix
from .tape import GradTape

LossFn = Callable[[Mapping[str, Matrix]], float]


def grad_check(f: LossFn, params: Mapping[str, Matrix], eps: float = 1e-5) -> float:
    """Max over all parameter entries of |g_ad - g_fd| / max(1, |g_ad|, |g_fd|)."""
    if not 1e-7 <= eps <= 1e-3:
        raise ConfigError(f"eps must lie in [1e-7, 1e-3], got {eps}")

    tape = GradTape()
    with tape:
        out = f(params)
    grads = tape.gradients(out)

    worst = 0.0
    for name, m in params.items():
        try:
            g_ad = grads.wrt(m)
        except NumericError as e:
            raise NumericError(f"non-finite gradient for parameter {name!r}") from e
        base = m.a
        for i in range(m.rows):
            for j in range(m.cols):
                up = base.copy()
                up[i, j] += eps
                down = base.copy()
                down[i, j] -= eps
                f_up = float(f({**params, name: Matrix(up)}))
                f_down = float(f({**params, name: Matrix(down)}))
                g_fd = (f_up - f_down) / (2.0 * eps)
                rel = abs(g_ad[i, j] - g_fd) / max(1.0, abs(g_ad[i, j]), abs(g_fd))
                worst = max(worst, rel)
    return worst
