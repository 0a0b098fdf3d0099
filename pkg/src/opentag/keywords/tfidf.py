"""TF-IDF keyword ranking with add-one smoothed IDF."""

from __future__ import annotations

import math
from collections import Counter

from ..errors import ConfigError
from . import CorpusStats, KeywordList


def tfidf_keywords(doc_terms: list[str], stats: CorpusStats, k: int) -> KeywordList:
    """Top-k terms by tf/|doc| * ln((1+N)/(1+df)); ties broken lexicographically."""
    if stats.document_count < 1:
        raise ConfigError("corpus stats must cover at least one document")
    if k <= 0 or not doc_terms:
        return []
    n_doc = len(doc_terms)
    counts = Counter(doc_terms)
    scored = []
    for term, tf in counts.items():
        idf = math.log((1.0 + stats.document_count) / (1.0 + stats.document_frequency[term]))
        scored.append((term, (tf / n_doc) * idf))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]
