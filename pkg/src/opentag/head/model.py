"""The tagging head pipeline.

Candidate label embeddings become attention queries; visual and textual token
sequences are projected to the model width, length-aligned, fused into one
key/value sequence, attended per head, mean-pooled over features, and squashed
to independent per-label probabilities. Every stage is built from taped
primitives, so running forward under a GradTape yields exact gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embedding import TokenSequence
from ..errors import ConfigError, DegenerateInputError, ShapeError
from ..numerics import (
    GradTape,
    Matrix,
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
from .params import FUSION_OPS, HeadParams


@dataclass(frozen=True)
class Prediction:
    candidates: tuple[str, ...]
    probabilities: tuple[float, ...]
    prob_matrix: Matrix  # L x 1, the tape-recorded output backward seeds from


def build_label_queries(params: HeadParams, label_embeddings: Matrix) -> Matrix:
    """Q = E @ p_label. E is L x text_dim."""
    if label_embeddings.cols != params.p_label.rows:
        raise ShapeError(
            f"label embedding width {label_embeddings.cols} does not match projection input {params.p_label.rows}"
        )
    return matmul(label_embeddings, params.p_label)


def _align(seq: TokenSequence, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Pad with invalid zero tokens or truncate the tail to exactly `length`."""
    arr, valid = seq.array, seq.validity
    if seq.length > length:
        return arr[:length], valid[:length]
    if seq.length < length:
        pad = length - seq.length
        arr = np.vstack([arr, np.zeros((pad, seq.dim))])
        valid = np.concatenate([valid, np.zeros(pad, dtype=bool)])
    return arr, valid


def project_streams(
    params: HeadParams, visual: TokenSequence, textual: TokenSequence
) -> tuple[Matrix, np.ndarray, Matrix, np.ndarray]:
    """Project both raw streams to width d and align them to seq_len rows."""
    if visual.dim != params.p_visual.rows:
        raise ShapeError(f"visual token width {visual.dim} does not match projection input {params.p_visual.rows}")
    if textual.dim != params.p_text.rows:
        raise ShapeError(f"textual token width {textual.dim} does not match projection input {params.p_text.rows}")
    s = params.dims.seq_len
    v_arr, v_valid = _align(visual, s)
    t_arr, t_valid = _align(textual, s)
    v_proj = matmul(Matrix(v_arr), params.p_visual)
    t_proj = matmul(Matrix(t_arr), params.p_text)
    return v_proj, v_valid, t_proj, t_valid


def fuse(
    params: HeadParams,
    visual_proj: Matrix,
    visual_valid: np.ndarray,
    textual_proj: Matrix,
    textual_valid: np.ndarray,
    op: str,
) -> tuple[Matrix, np.ndarray]:
    """Merge the two projected streams position-by-position into keys/values.

    add/max/median are symmetric in their arguments; cat is not (visual block
    first). Fused validity is the positionwise OR.
    """
    if op not in FUSION_OPS:
        raise ConfigError(f"unknown fusion op {op!r}, expected one of {FUSION_OPS}")
    if visual_proj.shape != textual_proj.shape:
        raise ShapeError(f"fusion needs aligned shapes, got {visual_proj.shape} vs {textual_proj.shape}")
    if op == "add":
        fused = add(visual_proj, textual_proj)
    elif op == "max":
        fused = ew_max(visual_proj, textual_proj)
    elif op == "median":
        # median of exactly two sequences is their elementwise mean
        fused = scale(add(visual_proj, textual_proj), 0.5)
    else:
        if params.p_cat is None:
            raise ConfigError("cat fusion requires p_cat to be allocated")
        fused = matmul(concat_cols([visual_proj, textual_proj]), params.p_cat)
    return fused, visual_valid | textual_valid


def attend(params: HeadParams, queries: Matrix, fused: Matrix, validity: np.ndarray) -> Matrix:
    """Multi-head scaled dot-product attention of label queries over fused tokens."""
    if not validity.any():
        raise DegenerateInputError("attention needs at least one valid fused token")
    d, heads = params.dims.model_dim, params.dims.heads
    head_dim = d // heads
    q_all = matmul(queries, params.w_q)
    k_all = matmul(fused, params.w_k)
    v_all = matmul(fused, params.w_v)
    inv_sqrt = 1.0 / np.sqrt(head_dim)
    per_head = []
    for h in range(heads):
        lo, hi = h * head_dim, (h + 1) * head_dim
        q_h = col_slice(q_all, lo, hi)
        k_h = col_slice(k_all, lo, hi)
        v_h = col_slice(v_all, lo, hi)
        scores = scale(matmul(q_h, transpose(k_h)), inv_sqrt)
        weights = softmax_rows(scores, mask=validity)
        per_head.append(matmul(weights, v_h))
    return matmul(concat_cols(per_head), params.w_o)


def score(params: HeadParams, attended: Matrix) -> Matrix:
    """Mean-pool the feature axis into one logit per label, then sigmoid."""
    pooled = mean_cols(attended)
    logits = add_scalar(mul_scalar(pooled, params.score_scale), params.score_bias)
    return sigmoid(logits)


def forward(
    params: HeadParams,
    candidates: list[str] | tuple[str, ...],
    label_embeddings: Matrix,
    visual: TokenSequence,
    textual: TokenSequence,
    op: str,
) -> Prediction:
    """Full pipeline; records on the active tape when one is open."""
    if label_embeddings.rows != len(candidates):
        raise ShapeError(f"{len(candidates)} candidates but {label_embeddings.rows} label embeddings")
    queries = build_label_queries(params, label_embeddings)
    v_proj, v_valid, t_proj, t_valid = project_streams(params, visual, textual)
    fused, validity = fuse(params, v_proj, v_valid, t_proj, t_valid, op)
    attended = attend(params, queries, fused, validity)
    probs = score(params, attended)
    return Prediction(
        candidates=tuple(candidates),
        probabilities=tuple(float(p) for p in probs.a[:, 0]),
        prob_matrix=probs,
    )


def backward(params: HeadParams, tape: GradTape, prediction: Prediction, dloss_dprobs: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients for every learnable field, seeded with dLoss/dProbabilities.

    Provider embeddings entered the graph as constants, so the frozen-encoder
    boundary holds by construction.
    """
    seed = np.asarray(dloss_dprobs, dtype=np.float64).reshape(prediction.prob_matrix.a.shape)
    grads = tape.gradients(prediction.prob_matrix, seed=seed)
    return {name: grads.wrt(matrix) for name, matrix in params.trainable().items()}
