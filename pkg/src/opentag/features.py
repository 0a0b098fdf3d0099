"""Turn samples and labels into the token sequences the head consumes.

Textual features are keyword embeddings: OCR keywords for image samples,
title-then-body keywords for text samples (each source extracted separately).
Visual features come straight from the provider; text-only samples get the
all-invalid placeholder. When keyword extraction yields nothing but the
sample has raw text, that text is embedded as a single fallback token so the
attention never sees an empty input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Manifest, SampleRecord
from .embedding import Provider, TokenSequence
from .errors import ConfigError
from .keywords import CorpusStats, textrank_keywords, tfidf_keywords, tokenize
from .numerics import Matrix
from .taxonomy import TagTaxonomy

EXTRACTORS = ("tfidf", "textrank")


@dataclass(frozen=True)
class FeatureConfig:
    use_ocr_keywords: bool = True
    use_title_keywords: bool = True
    keywords_per_source: int = 8
    extractor: str = "tfidf"
    textrank_window: int = 4
    textrank_damping: float = 0.85
    textrank_iterations: int = 100
    textrank_tolerance: float = 1e-6

    def __post_init__(self):
        if self.extractor not in EXTRACTORS:
            raise ConfigError(f"unknown keyword extractor {self.extractor!r}")
        if self.keywords_per_source < 1:
            raise ConfigError("keywords_per_source must be >= 1")


def document_terms(sample: SampleRecord) -> list[str]:
    return tokenize(" ".join(sample.text_fields()))


def corpus_stats_for(manifest: Manifest) -> CorpusStats:
    return CorpusStats.from_documents([document_terms(s) for s in manifest.samples])


def extract_keywords(text: str, stats: CorpusStats, cfg: FeatureConfig) -> list[str]:
    terms = tokenize(text)
    if not terms:
        return []
    if cfg.extractor == "tfidf":
        ranked = tfidf_keywords(terms, stats, cfg.keywords_per_source)
    else:
        ranked = textrank_keywords(
            terms,
            window=cfg.textrank_window,
            damping=cfg.textrank_damping,
            iterations=cfg.textrank_iterations,
            tolerance=cfg.textrank_tolerance,
            k=cfg.keywords_per_source,
        )
    return [term for term, _ in ranked]


def keyword_sources(sample: SampleRecord, cfg: FeatureConfig) -> list[str]:
    """Raw text chunks to run extraction over, in feature order."""
    if sample.modality == "image":
        return [sample.ocr_text] if (cfg.use_ocr_keywords and sample.ocr_text) else []
    sources = []
    if cfg.use_title_keywords and sample.title:
        sources.append(sample.title)
    if sample.body:
        sources.append(sample.body)
    return sources


def sample_keywords(sample: SampleRecord, stats: CorpusStats, cfg: FeatureConfig) -> list[str]:
    out: list[str] = []
    for source in keyword_sources(sample, cfg):
        for term in extract_keywords(source, stats, cfg):
            if term not in out:
                out.append(term)
    return out


def textual_tokens(
    sample: SampleRecord, stats: CorpusStats, provider: Provider, cfg: FeatureConfig
) -> TokenSequence:
    keywords = sample_keywords(sample, stats, cfg)
    if keywords:
        return TokenSequence.from_vectors([provider.embed_text(term) for term in keywords])
    raw = " ".join(sample.text_fields()).strip()
    if raw:
        return TokenSequence.from_vectors([provider.embed_text(raw)])
    return TokenSequence.empty(provider.text_dim, 1)


def visual_tokens(sample: SampleRecord, provider: Provider) -> TokenSequence:
    if sample.modality == "image" and sample.visual_ref:
        return provider.embed_visual(sample.visual_ref)
    return TokenSequence.empty(provider.visual_dim, 1)


def label_text(taxonomy: TagTaxonomy, tag_id: str, mode: str) -> str:
    """Text fed to the encoder for one candidate label."""
    tag = taxonomy.get(tag_id)
    definition = getattr(tag, "definition", "")
    if mode == "name+definition" and definition:
        return f"{tag.display_name}: {definition}"
    return tag.display_name


class LabelEmbeddingCache:
    """Per-tag embedding lookup reused across every step of a run."""

    def __init__(self, taxonomy: TagTaxonomy, provider: Provider, mode: str):
        self.taxonomy = taxonomy
        self.provider = provider
        self.mode = mode
        self._vectors: dict[str, np.ndarray] = {}

    def vector(self, tag_id: str) -> np.ndarray:
        vec = self._vectors.get(tag_id)
        if vec is None:
            vec = self.provider.embed_text(label_text(self.taxonomy, tag_id, self.mode)).values
            self._vectors[tag_id] = vec
        return vec

    def matrix(self, candidates: tuple[str, ...] | list[str]) -> Matrix:
        return Matrix(np.stack([self.vector(tag_id) for tag_id in candidates]))


def collect_archive_entries(
    manifest: Manifest, taxonomy: TagTaxonomy, provider: Provider, cfg: FeatureConfig
) -> dict[str, np.ndarray]:
    """Every archive entry a full pass over `manifest` would request.

    Covers both label text modes, keyword and fallback text tokens, and the
    visual token series with their count keys. Used to snapshot a stub
    provider's features into an archive; offline exporters follow the same
    key rules.
    """
    from .embedding import keys

    if provider.text_dim != provider.visual_dim:
        raise ConfigError("archives hold a single dim; provider text/visual widths must match")
    stats = corpus_stats_for(manifest)
    entries: dict[str, np.ndarray] = {}

    def put_text(text: str) -> None:
        entries.setdefault(keys.text_key(text), provider.embed_text(text).values.astype(np.float32))

    for tag in list(taxonomy.predefined) + list(taxonomy.open_tags):
        for mode in ("name", "name+definition"):
            put_text(label_text(taxonomy, tag.id, mode))
    for sample in manifest.samples:
        for term in sample_keywords(sample, stats, FeatureConfig()):
            put_text(term)
        for term in sample_keywords(sample, stats, cfg):
            put_text(term)
        raw = " ".join(sample.text_fields()).strip()
        if raw:
            put_text(raw)
        if sample.modality == "image" and sample.visual_ref:
            seq = provider.embed_visual(sample.visual_ref)
            count_vec = np.zeros(provider.visual_dim, dtype=np.float32)
            count_vec[0] = float(seq.length)
            entries[keys.visual_count_key(sample.visual_ref)] = count_vec
            for i in range(seq.length):
                entries[keys.visual_token_key(sample.visual_ref, i)] = seq.array[i].astype(np.float32)
    return entries
