"""Keyword extraction from OCR text, titles, and bodies.

Two rankers over the same tokenizer: TF-IDF (statistical) and TextRank
(graph-based). Both are pure functions of their inputs.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

# KeywordList: (term, score) pairs, scores non-increasing, terms unique.
KeywordList = list[tuple[str, float]]

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)  # unicode alphanumeric runs
_MIN_TERM_LEN = 2


def _load_stopwords() -> frozenset[str]:
    text = resources.files(__package__).joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


STOPWORDS = _load_stopwords()


def tokenize(text: str) -> list[str]:
    """Lowercase terms split on non-alphanumerics; drops stopwords and len < 2."""
    out = []
    for m in _TOKEN.finditer(text.casefold()):
        term = m.group(0)
        if len(term) >= _MIN_TERM_LEN and term not in STOPWORDS:
            out.append(term)
    return out


@dataclass
class CorpusStats:
    """Document frequencies backing the IDF term."""

    document_count: int = 0
    document_frequency: Counter = field(default_factory=Counter)

    def add_document(self, terms: list[str]) -> None:
        self.document_count += 1
        self.document_frequency.update(set(terms))

    @classmethod
    def from_documents(cls, documents: list[list[str]]) -> "CorpusStats":
        stats = cls()
        for terms in documents:
            stats.add_document(terms)
        return stats


from .textrank import textrank_keywords  # noqa: E402
from .tfidf import tfidf_keywords  # noqa: E402

__all__ = [
    "CorpusStats",
    "KeywordList",
    "STOPWORDS",
    "textrank_keywords",
    "tfidf_keywords",
    "tokenize",
]
