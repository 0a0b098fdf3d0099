"""TextRank keyword ranking: PageRank over a word co-occurrence graph."""

from __future__ import annotations

from ..errors import ConfigError
from . import KeywordList


def _cooccurrence_graph(doc_terms: list[str], window: int) -> dict[str, set[str]]:
    adjacency: dict[str, set[str]] = {}
    for i, term in enumerate(doc_terms):
        for j in range(i + 1, min(i + window, len(doc_terms))):
            other = doc_terms[j]
            if other == term:
                continue
            adjacency.setdefault(term, set()).add(other)
            adjacency.setdefault(other, set()).add(term)
    return adjacency


def textrank_keywords(
    doc_terms: list[str],
    window: int = 4,
    damping: float = 0.85,
    iterations: int = 100,
    tolerance: float = 1e-6,
    k: int = 8,
) -> KeywordList:
    """Top-k terms by PageRank: r <- (1-d)/|V| + d * sum over neighbors of r/deg.

    The graph is undirected co-occurrence within a sliding window; terms that
    never co-occur with another term are not part of the graph. Rank mass is
    conserved, so the rank vector sums to 1 at every iteration.
    """
    if window < 2:
        raise ConfigError(f"window must be >= 2, got {window}")
    if not 0.0 <= damping < 1.0:
        raise ConfigError(f"damping must lie in [0, 1), got {damping}")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")

    adjacency = _cooccurrence_graph(doc_terms, window)
    if not adjacency or k <= 0:
        return []

    vertices = sorted(adjacency)
    n = len(vertices)
    rank = {v: 1.0 / n for v in vertices}
    base = (1.0 - damping) / n
    for _ in range(iterations):
        spread = {v: rank[v] / len(adjacency[v]) for v in vertices}
        new_rank = {v: base + damping * sum(spread[u] for u in adjacency[v]) for v in vertices}
        delta = max(abs(new_rank[v] - rank[v]) for v in vertices)
        rank = new_rank
        if delta < tolerance:
            break

    scored = sorted(rank.items(), key=lambda item: (-item[1], item[0]))
    return scored[:k]
