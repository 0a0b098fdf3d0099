"""Candidate-set composition for training steps.

Each step scores six fixed predefined labels plus open-set labels: the
sample's true open tags are injected with a configured probability, and
negatives are drawn from the global open-tag pool with the sample's own tags
always excluded, so a negative can never collide with ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SampleRecord
from .errors import ConfigError
from .taxonomy import TagTaxonomy


@dataclass(frozen=True)
class LabelPool:
    """Open tags seen in the training corpus, with frequencies, ordered by id."""

    counts: tuple[tuple[str, int], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(tag_id for tag_id, _ in self.counts)

    def __len__(self) -> int:
        return len(self.counts)


def build_label_pool(samples: tuple[SampleRecord, ...] | list[SampleRecord]) -> LabelPool:
    counts: dict[str, int] = {}
    for sample in samples:
        for tag_id in sample.open_labels:
            counts[tag_id] = counts.get(tag_id, 0) + 1
    return LabelPool(counts=tuple(sorted(counts.items())))


@dataclass(frozen=True)
class CandidateRow:
    """One sample's composed candidates and binary targets."""

    candidates: tuple[str, ...]
    targets: np.ndarray
    injected: bool
    shortfall: int  # negatives that could not be sampled because the pool ran dry


@dataclass(frozen=True)
class StepBatch:
    rows: tuple[CandidateRow, ...]

    @property
    def injected_flags(self) -> tuple[bool, ...]:
        return tuple(row.injected for row in self.rows)


def compose_candidates(
    sample: SampleRecord,
    pool: LabelPool,
    taxonomy: TagTaxonomy,
    rng: np.random.Generator,
    inject_prob: float,
    neg_count: int,
    weighted: bool = False,
) -> CandidateRow:
    """Six fixed labels first, then injected true open tags, then negatives."""
    if not 0.0 <= inject_prob <= 1.0:
        raise ConfigError(f"inject_prob must lie in [0, 1], got {inject_prob}")
    if neg_count < 0:
        raise ConfigError(f"neg_count must be >= 0, got {neg_count}")

    gt = set(sample.labels)
    gt_open = sorted(sample.open_labels)
    injected = bool(rng.random() < inject_prob)

    available = [tag_id for tag_id in pool.ids if tag_id not in gt]
    take = min(neg_count, len(available))
    shortfall = neg_count - take
    if take > 0:
        if weighted:
            weights = np.array([count for tag_id, count in pool.counts if tag_id not in gt], dtype=np.float64)
            picks = rng.choice(len(available), size=take, replace=False, p=weights / weights.sum())
        else:
            picks = rng.choice(len(available), size=take, replace=False)
        negatives = [available[i] for i in np.sort(picks)]
    else:
        negatives = []

    candidates = list(taxonomy.predefined_ids)
    if injected:
        candidates.extend(gt_open)
    candidates.extend(negatives)
    targets = np.array([1.0 if tag_id in gt else 0.0 for tag_id in candidates])
    return CandidateRow(candidates=tuple(candidates), targets=targets, injected=injected, shortfall=shortfall)


def compose_step_batch(
    samples: list[SampleRecord],
    pool: LabelPool,
    taxonomy: TagTaxonomy,
    rngs: list[np.random.Generator],
    inject_prob: float,
    neg_count: int,
    weighted: bool = False,
) -> StepBatch:
    rows = tuple(
        compose_candidates(sample, pool, taxonomy, rng, inject_prob, neg_count, weighted)
        for sample, rng in zip(samples, rngs)
    )
    return StepBatch(rows=rows)
