"""Multi-label metrics, decision rules, and report shaping.

Overall numbers are micro-averaged (global TP/FP/FN sums); macro averaging is
available for sensitivity checks. Group splits count predefined-tier and
open-tier tags separately. Decision rules cover the shipped model (sigmoid
threshold) and the reference baselines (cosine threshold presets, top-k with
a score floor).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateInputError, ShapeError
from .taxonomy import TagTaxonomy, is_open_id, is_predefined_id

GROUPS = ("predefined", "open")


@dataclass(frozen=True)
class DecisionRule:
    kind: str  # "sigmoid" | "cosine" | "topk"
    threshold: float = 0.5
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("sigmoid", "cosine", "topk"):
            raise ConfigError(f"unknown decision rule kind {self.kind!r}")
        if not np.isfinite(self.threshold):
            raise ConfigError("decision threshold must be finite")
        if self.kind == "topk" and self.k < 1:
            raise ConfigError(f"top-k needs k >= 1, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "DecisionRule":
        """e.g. "sigmoid:0.5", "cos:17", "topk:2:0.01", or a preset name."""
        if text in BASELINE_PRESETS:
            return BASELINE_PRESETS[text]
        parts = text.split(":")
        try:
            if parts[0] in ("sigmoid", "sig") and len(parts) == 2:
                return cls(kind="sigmoid", threshold=float(parts[1]))
            if parts[0] in ("cosine", "cos") and len(parts) == 2:
                return cls(kind="cosine", threshold=float(parts[1]))
            if parts[0] == "topk" and len(parts) == 3:
                return cls(kind="topk", k=int(parts[1]), threshold=float(parts[2]))
        except ValueError as e:
            raise ConfigError(f"cannot parse decision rule {text!r}") from e
        raise ConfigError(f"cannot parse decision rule {text!r}")


# Baseline presets: the dual-encoder references threshold raw similarity
# scores at 17 (clip-like) and 5e-4 (siglip-like); the instruction-tuned
# reference keeps the top 2 logits and drops anything under 0.01.
BASELINE_PRESETS: dict[str, DecisionRule] = {
    "clip-like": DecisionRule(kind="cosine", threshold=17.0),
    "siglip-like": DecisionRule(kind="cosine", threshold=5e-4),
    "whatdoyousee-like": DecisionRule(kind="topk", k=2, threshold=0.01),
}


def decide(scores: list[float] | np.ndarray, candidates: list[str] | tuple[str, ...], rule: DecisionRule) -> set[str]:
    """Map per-candidate scores to a predicted tag set; ties keep input order."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (len(candidates),):
        raise ShapeError(f"{scores.shape[0] if scores.ndim else 0} scores for {len(candidates)} candidates")
    if rule.kind in ("sigmoid", "cosine"):
        return {c for c, s in zip(candidates, scores) if s >= rule.threshold}
    order = np.argsort(-scores, kind="stable")[: rule.k]
    return {candidates[i] for i in order if scores[i] >= rule.threshold}


def _in_group(tag_id: str, group: str | None) -> bool:
    if group is None:
        return True
    if group == "predefined":
        return is_predefined_id(tag_id)
    if group == "open":
        return is_open_id(tag_id)
    raise ConfigError(f"unknown group filter {group!r}")


def _counts(predictions: list[set[str]], ground_truth: list[set[str]], group: str | None) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for pred, gt in zip(predictions, ground_truth):
        pred_g = {t for t in pred if _in_group(t, group)}
        gt_g = {t for t in gt if _in_group(t, group)}
        tp += len(pred_g & gt_g)
        fp += len(pred_g - gt_g)
        fn += len(gt_g - pred_g)
    return tp, fp, fn


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def micro_metrics(
    predictions: list[set[str]], ground_truth: list[set[str]], group_filter: str | None = None
) -> tuple[float, float, float]:
    """Micro-averaged (precision, recall, f1) over globally summed counts."""
    if len(predictions) != len(ground_truth):
        raise ShapeError(f"{len(predictions)} prediction sets vs {len(ground_truth)} ground-truth sets")
    if not any(ground_truth):
        raise DegenerateInputError("recall is undefined: ground truth is empty for every sample")
    return _prf(*_counts(predictions, ground_truth, group_filter))


def macro_metrics(
    predictions: list[set[str]], ground_truth: list[set[str]], group_filter: str | None = None
) -> tuple[float, float, float]:
    """Per-tag (precision, recall, f1) averaged uniformly over observed tags."""
    if not any(ground_truth):
        raise DegenerateInputError("recall is undefined: ground truth is empty for every sample")
    tags = sorted(
        {t for s in predictions for t in s if _in_group(t, group_filter)}
        | {t for s in ground_truth for t in s if _in_group(t, group_filter)}
    )
    if not tags:
        return 0.0, 0.0, 0.0
    triples = [
        _prf(*_counts([{t} & p for p in predictions], [{t} & g for g in ground_truth], None))
        for t in tags
    ]
    arr = np.array(triples)
    return tuple(float(x) for x in arr.mean(axis=0))  # type: ignore[return-value]


@dataclass(frozen=True)
class TagRow:
    tag_id: str
    display_name: str
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def per_tag_report(
    predictions: list[set[str]],
    ground_truth: list[set[str]],
    taxonomy: TagTaxonomy,
    top_n_open: int = 6,
) -> list[TagRow]:
    """One row per predefined tag plus the top-n most frequent open tags.

    Tags absent from both ground truth and predictions are omitted.
    """
    gt_freq: dict[str, int] = {}
    for gt in ground_truth:
        for tag_id in gt:
            gt_freq[tag_id] = gt_freq.get(tag_id, 0) + 1
    predicted_ever = {t for p in predictions for t in p}

    chosen = [t.id for t in taxonomy.predefined if t.id in gt_freq or t.id in predicted_ever]
    open_by_freq = sorted(
        (t for t in gt_freq if is_open_id(t)), key=lambda t: (-gt_freq[t], t)
    )
    chosen += open_by_freq[:top_n_open]

    rows = []
    for tag_id in chosen:
        tp, fp, fn = _counts([{tag_id} & p for p in predictions], [{tag_id} & g for g in ground_truth], None)
        p, r, f1 = _prf(tp, fp, fn)
        rows.append(TagRow(tag_id, taxonomy.display_name(tag_id), p, r, f1, tp, fp, fn))
    return rows


@dataclass
class MetricsReport:
    overall: tuple[float, float, float]
    counts: tuple[int, int, int]  # tp, fp, fn
    groups: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    group_counts: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    per_tag: list[TagRow] = field(default_factory=list)
    config_echo: dict[str, str] = field(default_factory=dict)


def build_report(
    predictions: list[set[str]],
    ground_truth: list[set[str]],
    taxonomy: TagTaxonomy | None = None,
    split_groups: bool = False,
    top_n_open: int | None = None,
    averaging: str = "micro",
    config_echo: dict[str, str] | None = None,
) -> MetricsReport:
    metrics = micro_metrics if averaging == "micro" else macro_metrics
    report = MetricsReport(
        overall=metrics(predictions, ground_truth),
        counts=_counts(predictions, ground_truth, None),
        config_echo=dict(config_echo or {}),
    )
    if split_groups:
        for group in GROUPS:
            report.groups[group] = _prf(*_counts(predictions, ground_truth, group))
            report.group_counts[group] = _counts(predictions, ground_truth, group)
    if top_n_open is not None and taxonomy is not None:
        report.per_tag = per_tag_report(predictions, ground_truth, taxonomy, top_n_open)
    return report


def format_report(report: MetricsReport) -> str:
    """Human-readable aligned table, one metrics row per scope."""
    lines = []
    if report.config_echo:
        lines.append("  ".join(f"{k}={v}" for k, v in sorted(report.config_echo.items())))
    header = f"{'scope':<34} {'Prec.':>7} {'Rec.':>7} {'F1':>7}"
    lines += [header, "-" * len(header)]

    def row(name: str, triple: tuple[float, float, float]) -> str:
        p, r, f1 = triple
        return f"{name:<34} {p:>7.2f} {r:>7.2f} {f1:>7.2f}"

    lines.append(row("overall", report.overall))
    for group, triple in report.groups.items():
        lines.append(row(f"group:{group}", triple))
    for tag in report.per_tag:
        lines.append(row(tag.display_name, (tag.precision, tag.recall, tag.f1)))
    return "\n".join(lines)


def report_records(report: MetricsReport) -> list[str]:
    """Machine-readable lines: scope<TAB>precision<TAB>recall<TAB>f1<TAB>tp<TAB>fp<TAB>fn."""
    tp, fp, fn = report.counts
    lines = [f"overall\t{report.overall[0]:.6f}\t{report.overall[1]:.6f}\t{report.overall[2]:.6f}\t{tp}\t{fp}\t{fn}"]
    for group, (p, r, f1) in report.groups.items():
        gtp, gfp, gfn = report.group_counts[group]
        lines.append(f"group:{group}\t{p:.6f}\t{r:.6f}\t{f1:.6f}\t{gtp}\t{gfp}\t{gfn}")
    for tag in report.per_tag:
        lines.append(
            f"tag:{tag.tag_id}\t{tag.precision:.6f}\t{tag.recall:.6f}\t{tag.f1:.6f}\t{tag.tp}\t{tag.fp}\t{tag.fn}"
        )
    return lines


def cosine_baseline(
    provider,
    sample_text: str | list[str],
    candidates: list[tuple[str, str]],
    threshold: float,
) -> set[str]:
    """Zero-shot baseline: cosine(sample embedding, label embedding) >= threshold.

    candidates are (tag_id, label_text) pairs; sample_text may be raw text or
    a keyword list (joined with spaces before embedding).
    """
    text = " ".join(sample_text) if isinstance(sample_text, list) else sample_text
    sample_vec = provider.embed_text(text).values
    norm = np.linalg.norm(sample_vec)
    if norm == 0.0:
        raise DegenerateInputError("sample embedding has zero norm")
    predicted = set()
    for tag_id, label in candidates:
        label_vec = provider.embed_text(label).values
        label_norm = np.linalg.norm(label_vec)
        if label_norm == 0.0:
            raise DegenerateInputError(f"label embedding for {tag_id!r} has zero norm")
        if float(sample_vec @ label_vec / (norm * label_norm)) >= threshold:
            predicted.add(tag_id)
    return predicted
