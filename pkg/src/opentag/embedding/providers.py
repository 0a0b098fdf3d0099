"""Frozen text/visual embeddings behind a provider interface.

Encoders never run inside this package: a provider either synthesizes
deterministic pseudo-embeddings (stub, for tests and synthetic data) or looks
vectors up in a binary archive exported offline. Providers are immutable and
referentially transparent, so concurrent reads are safe.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, MissingEmbeddingError, ValidationError
from . import keys
from .archive import read_archive

DEFAULT_TEXT_DIM = 64
DEFAULT_VISUAL_DIM = 64
DEFAULT_VISUAL_TOKENS = 8


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray  # 1-D float64

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


class TokenSequence:
    """Fixed-width token embeddings with per-token validity flags.

    An all-invalid sequence is the placeholder for an absent modality
    (e.g. the visual stream of a text-only sample).
    """

    def __init__(self, array: np.ndarray, validity: np.ndarray):
        array = np.ascontiguousarray(array, dtype=np.float64)
        validity = np.asarray(validity, dtype=bool)
        if array.ndim != 2 or validity.shape != (array.shape[0],):
            raise ValidationError("token array must be 2-D with one validity flag per token")
        self.array = array
        self.validity = validity

    @classmethod
    def from_vectors(cls, vectors: list[EmbeddingVector]) -> "TokenSequence":
        if not vectors:
            raise ValidationError("from_vectors requires at least one token")
        return cls(np.stack([v.values for v in vectors]), np.ones(len(vectors), dtype=bool))

    @classmethod
    def empty(cls, dim: int, length: int) -> "TokenSequence":
        """All-zero, all-invalid placeholder for an absent modality."""
        return cls(np.zeros((max(length, 1), dim)), np.zeros(max(length, 1), dtype=bool))

    @property
    def dim(self) -> int:
        return int(self.array.shape[1])

    @property
    def length(self) -> int:
        return int(self.array.shape[0])

    @property
    def tokens(self) -> list[EmbeddingVector]:
        return [EmbeddingVector(self.array[i]) for i in range(self.length)]

    @property
    def any_valid(self) -> bool:
        return bool(self.validity.any())


@dataclass(frozen=True)
class ProviderSpec:
    kind: str = "stub"  # "stub" | "archive"
    text_dim: int = DEFAULT_TEXT_DIM
    visual_dim: int = DEFAULT_VISUAL_DIM
    seed: int = 0
    visual_tokens: int = DEFAULT_VISUAL_TOKENS
    archive_path: str | None = None

    def __post_init__(self):
        if self.kind not in ("stub", "archive"):
            raise ConfigError(f"unknown provider kind {self.kind!r}")
        if self.text_dim <= 0 or self.visual_dim <= 0:
            raise ConfigError("embedding dims must be positive")
        if self.kind == "archive" and not self.archive_path:
            raise ConfigError("archive provider needs archive_path")


def _hash_rng(*parts: object) -> np.random.Generator:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))


_WORD = re.compile(r"[^\W_]+", re.UNICODE)


class StubProvider:
    """Deterministic pseudo-encoder: unit-norm vectors from seeded hashes.

    Text embeddings are bag-of-words: the normalized sum of one seeded hash
    vector per word. Shared words give related texts related embeddings, the
    property real text encoders provide and label-query attention relies on;
    distinct single words remain effectively orthogonal.
    """

    def __init__(
        self,
        text_dim: int = DEFAULT_TEXT_DIM,
        visual_dim: int = DEFAULT_VISUAL_DIM,
        seed: int = 0,
        visual_tokens: int = DEFAULT_VISUAL_TOKENS,
    ):
        self.text_dim = text_dim
        self.visual_dim = visual_dim
        self.seed = seed
        self.visual_tokens = visual_tokens

    def _word_vector(self, word: str) -> np.ndarray:
        v = _hash_rng(self.seed, "word", word).standard_normal(self.text_dim)
        return v / np.linalg.norm(v)

    def embed_text(self, text: str) -> EmbeddingVector:
        normalized = keys.normalize_text(text)
        if not normalized:
            raise ValidationError("embed_text requires non-empty text")
        words = _WORD.findall(normalized)
        if words:
            v = np.sum([self._word_vector(w) for w in words], axis=0)
        else:  # pure punctuation: hash the normalized string itself
            v = _hash_rng(self.seed, "word", normalized).standard_normal(self.text_dim)
        return EmbeddingVector(v / np.linalg.norm(v))

    def embed_visual(self, feature_ref: str) -> TokenSequence:
        if not feature_ref:
            return TokenSequence.empty(self.visual_dim, self.visual_tokens)
        rows = []
        for i in range(self.visual_tokens):
            rng = _hash_rng(self.seed, "visual", feature_ref, i)
            v = rng.standard_normal(self.visual_dim)
            rows.append(v / np.linalg.norm(v))
        return TokenSequence(np.stack(rows), np.ones(self.visual_tokens, dtype=bool))


class ArchiveProvider:
    """Serves vectors from a loaded archive; every miss is an error."""

    def __init__(self, path: str | Path):
        self.path = str(path)
        _, dim, entries = read_archive(path)
        self._entries = entries
        self.text_dim = dim
        self.visual_dim = dim

    @property
    def key_count(self) -> int:
        return len(self._entries)

    def _lookup(self, key: str) -> np.ndarray:
        vec = self._entries.get(key)
        if vec is None:
            raise MissingEmbeddingError(key)
        return vec.astype(np.float64)

    def embed_text(self, text: str) -> EmbeddingVector:
        if not keys.normalize_text(text):
            raise ValidationError("embed_text requires non-empty text")
        return EmbeddingVector(self._lookup(keys.text_key(text)))

    def embed_visual(self, feature_ref: str) -> TokenSequence:
        if not feature_ref:
            return TokenSequence.empty(self.visual_dim, 1)
        count_vec = self._lookup(keys.visual_count_key(feature_ref))
        count = int(round(float(count_vec[0])))
        if count <= 0:
            raise MissingEmbeddingError(keys.visual_token_key(feature_ref, 0))
        rows = [self._lookup(keys.visual_token_key(feature_ref, i)) for i in range(count)]
        return TokenSequence(np.stack(rows), np.ones(count, dtype=bool))


Provider = StubProvider | ArchiveProvider


def load_archive(path: str | Path) -> ArchiveProvider:
    return ArchiveProvider(path)


def make_provider(spec: ProviderSpec) -> Provider:
    if spec.kind == "stub":
        return StubProvider(spec.text_dim, spec.visual_dim, spec.seed, spec.visual_tokens)
    return ArchiveProvider(spec.archive_path)  # type: ignore[arg-type]
