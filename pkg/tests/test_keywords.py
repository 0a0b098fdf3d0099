import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opentag.errors import ConfigError
from opentag.keywords import CorpusStats, textrank_keywords, tfidf_keywords, tokenize

from .oracles import pagerank_power_iteration


def test_tokenize_normalizes_and_keeps_duplicates():
    assert tokenize("Wedding, wedding PLANNING!") == ["wedding", "wedding", "planning"]


def test_tokenize_drops_stopwords():
    assert tokenize("a of the") == []


def test_tokenize_splits_on_hyphen_keeps_two_letter_terms():
    assert tokenize("AI-powered EV charging") == ["ai", "powered", "ev", "charging"]


def test_tokenize_splits_on_underscore():
    assert tokenize("snake_case_words") == ["snake", "case", "words"]


def make_stats(n_docs: int, df: dict[str, int]) -> CorpusStats:
    stats = CorpusStats(document_count=n_docs)
    stats.document_frequency.update(df)
    return stats


def test_tfidf_ubiquitous_term_scores_zero():
    # x occurs in every one of 10 docs: idf = ln(11/11) = 0, so y outranks x
    stats = make_stats(10, {"x": 10, "y": 1})
    ranked = tfidf_keywords(["x", "x", "y"], stats, k=2)
    assert [t for t, _ in ranked] == ["y", "x"]
    assert ranked[1][1] == 0.0


def test_tfidf_hand_computed_three_doc_corpus():
    docs = [
        ["wedding", "venue", "flowers"],
        ["wedding", "budget"],
        ["quarterly", "budget", "report"],
    ]
    stats = CorpusStats.from_documents(docs)
    ranked = dict(tfidf_keywords(docs[0], stats, k=3))
    n = 3
    assert abs(ranked["venue"] - (1 / 3) * math.log((1 + n) / (1 + 1))) < 1e-12
    assert abs(ranked["wedding"] - (1 / 3) * math.log((1 + n) / (1 + 2))) < 1e-12


def test_tfidf_tie_broken_lexicographically():
    stats = CorpusStats.from_documents([["a", "b"]])
    ranked = tfidf_keywords(["b", "a"], stats, k=2)
    assert [t for t, _ in ranked] == ["a", "b"]
    assert ranked[0][1] == ranked[1][1]


def test_tfidf_k_larger_than_vocab_returns_all():
    stats = CorpusStats.from_documents([["a", "b"]])
    assert len(tfidf_keywords(["a", "b"], stats, k=10)) == 2


def test_tfidf_k_zero_returns_empty():
    stats = CorpusStats.from_documents([["a"]])
    assert tfidf_keywords(["a"], stats, k=0) == []


def test_tfidf_requires_nonempty_corpus():
    with pytest.raises(ConfigError):
        tfidf_keywords(["a"], CorpusStats(), k=1)


@settings(max_examples=30, deadline=None)
@given(st.permutations(["ant", "bee", "bee", "cat", "dog", "dog", "dog"]))
def test_tfidf_scores_invariant_under_term_order(perm):
    stats = CorpusStats.from_documents([["ant", "bee"], ["dog"], ["cat", "dog"]])
    base = dict(tfidf_keywords(["ant", "bee", "bee", "cat", "dog", "dog", "dog"], stats, k=10))
    assert dict(tfidf_keywords(list(perm), stats, k=10)) == base


STAR_DOC = ["a", "hub", "b", "hub", "c", "hub", "d"]  # window 2 gives a 4-leaf star


def test_textrank_star_hub_ranks_strictly_highest():
    ranked = textrank_keywords(STAR_DOC, window=2, k=5)
    assert ranked[0][0] == "hub"
    assert ranked[0][1] > ranked[1][1]


def test_textrank_matches_power_iteration_oracle():
    adjacency = {"hub": {"a", "b", "c", "d"}, "a": {"hub"}, "b": {"hub"}, "c": {"hub"}, "d": {"hub"}}
    oracle = pagerank_power_iteration(adjacency, damping=0.85)
    ranked = dict(textrank_keywords(STAR_DOC, window=2, damping=0.85, iterations=500, tolerance=1e-12, k=5))
    for term, rank in oracle.items():
        assert abs(ranked[term] - rank) < 1e-9


def test_textrank_symmetric_pair_has_equal_ranks():
    ranked = dict(textrank_keywords(["x", "y", "x", "y"], window=2, k=2))
    assert abs(ranked["x"] - ranked["y"]) < 1e-9


def test_textrank_zero_damping_is_uniform():
    ranked = textrank_keywords(STAR_DOC, window=2, damping=0.0, k=5)
    for _, rank in ranked:
        assert abs(rank - 1 / 5) < 1e-12


def test_textrank_ranks_sum_to_one():
    ranked = textrank_keywords(STAR_DOC, window=3, damping=0.85, k=100)
    assert abs(sum(r for _, r in ranked) - 1.0) < 1e-6


def test_textrank_empty_graph_gives_empty_list():
    assert textrank_keywords(["solo"], window=2, k=3) == []
    assert textrank_keywords([], window=2, k=3) == []


def test_textrank_parameter_validation():
    with pytest.raises(ConfigError):
        textrank_keywords(STAR_DOC, window=1)
    with pytest.raises(ConfigError):
        textrank_keywords(STAR_DOC, damping=1.0)
    with pytest.raises(ConfigError):
        textrank_keywords(STAR_DOC, iterations=0)


def test_both_extractors_deterministic():
    stats = CorpusStats.from_documents([STAR_DOC])
    assert tfidf_keywords(STAR_DOC, stats, 5) == tfidf_keywords(STAR_DOC, stats, 5)
    assert textrank_keywords(STAR_DOC) == textrank_keywords(STAR_DOC)
