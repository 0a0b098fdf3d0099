"""The optimization loop: mini-batch SGD over composed candidate sets.

Encoders stay frozen behind the provider; only head parameters move. All
randomness (split, shuffling, injection, negative sampling, init) derives
from one seed through named streams, so a run is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Manifest, split
from .embedding import Provider
from .errors import ConfigError, NumericError
from .evaluation import DecisionRule, decide, micro_metrics
from .features import FeatureConfig, LabelEmbeddingCache, corpus_stats_for, textual_tokens, visual_tokens
from .head import HeadDims, HeadParams, forward, init_params
from .numerics import GradTape, LrSchedule, Matrix, asymmetric_loss, bce_loss, lr_at
from .sampler import LabelPool, build_label_pool, compose_candidates
from .taxonomy import TagTaxonomy

LOSSES = ("bce", "asymmetric")
TRACE_HEADER = "epoch,step,lr,loss,val_precision,val_recall,val_f1"


@dataclass(frozen=True)
class TrainingConfig:
    lr: float = 1e-3
    batch_size: int = 64
    epochs: int = 200
    t0: int = 100
    t_mult: float = 1.0
    eta_min: float = 0.0
    inject_prob: float = 0.5
    neg_count: int = 8
    loss: str = "bce"
    asl_gamma_pos: float = 0.0
    asl_gamma_neg: float = 4.0
    asl_clip: float = 0.05
    fusion: str = "add"
    seed: int = 0
    grad_clip: float = 0.0  # 0 disables clipping
    val_ratio: float = 0.1
    threshold: float = 0.5
    weighted_negatives: bool = False
    model_dim: int = 256
    heads: int = 4
    seq_len: int = 16
    label_text_mode: str = "name+definition"
    features: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss!r}, expected one of {LOSSES}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ConfigError("batch_size and epochs must be >= 1")
        if not 0.0 < self.val_ratio < 1.0:
            raise ConfigError(f"val_ratio must lie in (0, 1), got {self.val_ratio}")


@dataclass
class TrainResult:
    final_params: HeadParams
    best_params: HeadParams
    best_epoch: int
    best_f1: float
    best_metrics: tuple[float, float, float]
    final_metrics: tuple[float, float, float]
    trace: list[str]
    pool: LabelPool
    config: TrainingConfig
    taxonomy_hash: str


def _stream(seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(path))))


def optimizer_step(
    params: HeadParams, grads: dict[str, np.ndarray], lr: float, clip: float = 0.0
) -> HeadParams:
    """Plain gradient descent p <- p - lr*g with optional global-norm clipping."""
    if clip > 0.0:
        total = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        if total > clip:
            factor = clip / total
            grads = {name: g * factor for name, g in grads.items()}
    updates = {}
    for name, grad in grads.items():
        current: Matrix = getattr(params, name)
        try:
            updates[name] = Matrix(current.a - lr * grad)
        except NumericError as e:
            raise NumericError(f"parameter {name!r} became non-finite during the update") from e
    return params.with_updates(**updates)


def _loss_fn(config: TrainingConfig):
    if config.loss == "bce":
        return bce_loss
    return lambda p, y: asymmetric_loss(p, y, config.asl_gamma_pos, config.asl_gamma_neg, config.asl_clip)


def evaluate_params(
    params: HeadParams,
    samples,
    candidates: tuple[str, ...],
    label_cache: LabelEmbeddingCache,
    feature_cache: dict,
    fusion: str,
    rule: DecisionRule,
) -> tuple[list[set[str]], list[set[str]]]:
    """Predictions and ground truth for a fixed candidate list."""
    label_matrix = label_cache.matrix(candidates)
    predictions, truths = [], []
    for sample in samples:
        vis, txt = feature_cache[sample.id]
        pred = forward(params, candidates, label_matrix, vis, txt, fusion)
        predictions.append(decide(list(pred.probabilities), list(candidates), rule))
        truths.append(set(sample.labels))
    return predictions, truths


def train(
    manifest: Manifest,
    taxonomy: TagTaxonomy,
    provider: Provider,
    config: TrainingConfig,
    val_manifest: Manifest | None = None,
    log=None,
) -> TrainResult:
    if not manifest.samples:
        raise ConfigError("training manifest is empty")
    dims = HeadDims(
        text_dim=provider.text_dim,
        visual_dim=provider.visual_dim,
        model_dim=config.model_dim,
        heads=config.heads,
        seq_len=config.seq_len,
    )
    if val_manifest is None:
        train_split, val_split = split(manifest, 1.0 - config.val_ratio, seed=config.seed)
    else:
        train_split, val_split = manifest, val_manifest

    stats = corpus_stats_for(manifest)
    pool = build_label_pool(train_split.samples)
    label_cache = LabelEmbeddingCache(taxonomy, provider, config.label_text_mode)
    feature_cache = {
        s.id: (visual_tokens(s, provider), textual_tokens(s, stats, provider, config.features))
        for s in list(train_split.samples) + list(val_split.samples)
    }

    params = init_params(config.seed, dims)
    schedule = LrSchedule(eta_max=config.lr, t0=config.t0, eta_min=config.eta_min, t_mult=config.t_mult)
    loss_fn = _loss_fn(config)
    val_rule = DecisionRule(kind="sigmoid", threshold=config.threshold)
    eval_candidates = taxonomy.predefined_ids + pool.ids

    best_params, best_f1, best_epoch = params, -1.0, -1
    best_metrics = final_metrics = (0.0, 0.0, 0.0)
    trace: list[str] = [TRACE_HEADER]
    global_step = 0
    n_train = len(train_split.samples)

    for epoch in range(config.epochs):
        order = _stream(config.seed, 1, epoch).permutation(n_train)
        epoch_losses: list[float] = []
        for batch_start in range(0, n_train, config.batch_size):
            batch_idx = order[batch_start : batch_start + config.batch_size]
            lr = lr_at(schedule, global_step)
            acc: dict[str, np.ndarray] = {}
            batch_loss = 0.0
            for idx in batch_idx:
                sample = train_split.samples[int(idx)]
                row = compose_candidates(
                    sample,
                    pool,
                    taxonomy,
                    _stream(config.seed, 2, epoch, int(idx)),
                    config.inject_prob,
                    config.neg_count,
                    config.weighted_negatives,
                )
                label_matrix = label_cache.matrix(row.candidates)
                vis, txt = feature_cache[sample.id]
                tape = GradTape()
                with tape:
                    pred = forward(params, row.candidates, label_matrix, vis, txt, config.fusion)
                    loss = loss_fn(pred.prob_matrix, row.targets)
                if not math.isfinite(loss):
                    raise NumericError(
                        f"non-finite loss at epoch {epoch}, batch starting at {batch_start}, sample {sample.id!r}"
                    )
                batch_loss += float(loss)
                grads = tape.gradients(loss)
                inv = 1.0 / len(batch_idx)
                for name, matrix in params.trainable().items():
                    g = grads.wrt(matrix) * inv
                    acc[name] = acc.get(name, 0.0) + g
            params = optimizer_step(params, acc, lr, config.grad_clip)
            epoch_losses.append(batch_loss / len(batch_idx))
            global_step += 1

        predictions, truths = evaluate_params(
            params, val_split.samples, eval_candidates, label_cache, feature_cache, config.fusion, val_rule
        )
        vp, vr, vf1 = micro_metrics(predictions, truths)
        mean_loss = float(np.mean(epoch_losses))
        trace.append(f"{epoch},{global_step},{lr:.10g},{mean_loss:.10g},{vp:.6f},{vr:.6f},{vf1:.6f}")
        if log is not None:
            log(trace[-1])
        final_metrics = (vp, vr, vf1)
        if vf1 > best_f1:
            best_params, best_f1, best_epoch = params, vf1, epoch
            best_metrics = final_metrics

    return TrainResult(
        final_params=params,
        best_params=best_params,
        best_epoch=best_epoch,
        best_f1=best_f1,
        best_metrics=best_metrics,
        final_metrics=final_metrics,
        trace=trace,
        pool=pool,
        config=config,
        taxonomy_hash=taxonomy.taxonomy_hash(),
    )
