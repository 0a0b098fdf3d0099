"""Trainable attention head: label queries over fused visual/textual tokens."""

from .checkpoint import LABEL_TEXT_MODES, load_checkpoint, save_checkpoint
from .model import Prediction, attend, backward, build_label_queries, forward, fuse, project_streams, score
from .params import FUSION_OPS, HeadDims, HeadParams, init_params

__all__ = [
    "FUSION_OPS",
    "LABEL_TEXT_MODES",
    "HeadDims",
    "HeadParams",
    "Prediction",
    "attend",
    "backward",
    "build_label_queries",
    "forward",
    "fuse",
    "init_params",
    "load_checkpoint",
    "project_streams",
    "save_checkpoint",
    "score",
]
