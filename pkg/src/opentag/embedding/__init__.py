"""Frozen encoder outputs as lookups: providers, archive format, key rules."""

from .archive import MAGIC, VERSION, read_archive, write_archive
from .keys import normalize_text, text_key, visual_count_key, visual_token_key
from .providers import (
    ArchiveProvider,
    EmbeddingVector,
    Provider,
    ProviderSpec,
    StubProvider,
    TokenSequence,
    load_archive,
    make_provider,
)

__all__ = [
    "MAGIC",
    "VERSION",
    "ArchiveProvider",
    "EmbeddingVector",
    "Provider",
    "ProviderSpec",
    "StubProvider",
    "TokenSequence",
    "load_archive",
    "make_provider",
    "normalize_text",
    "read_archive",
    "text_key",
    "visual_count_key",
    "visual_token_key",
    "write_archive",
]
