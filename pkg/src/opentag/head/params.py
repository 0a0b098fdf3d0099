"""Learnable parameters of the tagging head."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError
from ..numerics import Matrix

FUSION_OPS = ("add", "cat", "max", "median")


@dataclass(frozen=True)
class HeadDims:
    text_dim: int
    visual_dim: int
    model_dim: int
    heads: int
    seq_len: int

    def __post_init__(self):
        if min(self.text_dim, self.visual_dim, self.model_dim, self.heads, self.seq_len) <= 0:
            raise ConfigError(f"head dims must be positive, got {self}")
        if self.model_dim % self.heads != 0:
            raise ConfigError(f"model_dim {self.model_dim} is not divisible by heads {self.heads}")


@dataclass(frozen=True)
class HeadParams:
    """Projections, attention weights, and the scoring scale/bias.

    Field order is the checkpoint serialization order.
    """

    p_label: Matrix  # text_dim x d, label embeddings -> queries
    p_visual: Matrix  # visual_dim x d
    p_text: Matrix  # text_dim x d
    p_cat: Matrix | None  # 2d x d, used only by "cat" fusion
    w_q: Matrix  # d x d
    w_k: Matrix  # d x d
    w_v: Matrix  # d x d
    w_o: Matrix  # d x d
    score_scale: Matrix  # 1x1
    score_bias: Matrix  # 1x1
    dims: HeadDims

    MATRIX_FIELDS = ("p_label", "p_visual", "p_text", "p_cat", "w_q", "w_k", "w_v", "w_o", "score_scale", "score_bias")

    def trainable(self) -> dict[str, Matrix]:
        """Ordered name -> Matrix mapping of every learnable field."""
        out = {}
        for name in self.MATRIX_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    def with_updates(self, **fields: Matrix) -> "HeadParams":
        return replace(self, **fields)


def init_params(seed: int, dims: HeadDims) -> HeadParams:
    """Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]; scale 1, bias 0."""
    rng = np.random.Generator(np.random.PCG64(seed))
    d = dims.model_dim

    def uniform(fan_in: int, cols: int) -> Matrix:
        bound = 1.0 / np.sqrt(fan_in)
        return Matrix(rng.uniform(-bound, bound, size=(fan_in, cols)))

    return HeadParams(
        p_label=uniform(dims.text_dim, d),
        p_visual=uniform(dims.visual_dim, d),
        p_text=uniform(dims.text_dim, d),
        p_cat=uniform(2 * d, d),
        w_q=uniform(d, d),
        w_k=uniform(d, d),
        w_v=uniform(d, d),
        w_o=uniform(d, d),
        score_scale=Matrix.scalar(1.0),
        score_bias=Matrix.scalar(0.0),
        dims=dims,
    )
