import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opentag.dataset import SampleRecord
from opentag.errors import ConfigError
from opentag.sampler import build_label_pool, compose_candidates, compose_step_batch
from opentag.taxonomy import load_builtin_taxonomy


def make_world(pool_tags=("Alpha", "Beta", "Gamma", "Delta")):
    taxonomy = load_builtin_taxonomy()
    ids = [taxonomy.register_open_tag(name, "dataset") for name in pool_tags]
    samples = [
        SampleRecord(id=f"s{i}", modality="text", title="t", body="b",
                     labels=("fixed:life-moments", tag_id))
        for i, tag_id in enumerate(ids)
    ]
    return taxonomy, ids, samples


def test_pool_union_with_frequencies():
    taxonomy, ids, _ = make_world(("A", "B", "C"))
    samples = [
        SampleRecord(id="1", modality="text", body="x", labels=(ids[0],)),
        SampleRecord(id="2", modality="text", body="x", labels=(ids[0], ids[1])),
        SampleRecord(id="3", modality="text", body="x", labels=(ids[2],)),
    ]
    pool = build_label_pool(samples)
    assert dict(pool.counts) == {ids[0]: 2, ids[1]: 1, ids[2]: 1}


def test_pool_ignores_predefined_tags():
    samples = [SampleRecord(id="1", modality="text", body="x", labels=("fixed:life-moments",))]
    assert len(build_label_pool(samples)) == 0


def test_pool_is_order_independent():
    taxonomy, ids, samples = make_world()
    assert build_label_pool(samples) == build_label_pool(list(reversed(samples)))


def test_forced_injection_includes_ground_truth():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    row = compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(0), 1.0, 2)
    gt_open = samples[0].open_labels[0]
    assert gt_open in row.candidates
    assert row.targets[row.candidates.index(gt_open)] == 1.0
    negatives = [c for c in row.candidates[6:] if c != gt_open]
    assert len(negatives) == 2
    assert all(row.targets[row.candidates.index(n)] == 0.0 for n in negatives)


def test_forced_exclusion_drops_open_ground_truth():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    for seed in range(20):
        row = compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(seed), 0.0, 2)
        assert samples[0].open_labels[0] not in row.candidates
        assert row.targets[6:].sum() == 0.0


def test_first_six_candidates_are_the_predefined_tags():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    row = compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(1), 0.5, 2)
    assert row.candidates[:6] == taxonomy.predefined_ids


def test_fixed_targets_reflect_ground_truth_regardless_of_sampling():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    for seed in range(10):
        row = compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(seed), 0.5, 3)
        assert row.targets[:6].tolist() == [0.0, 1.0, 0.0, 0.0, 0.0, 0.0]


def test_shortfall_recorded_when_pool_is_small():
    taxonomy, ids, samples = make_world(("Solo",))
    pool = build_label_pool(samples[:1])
    row = compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(0), 0.0, 5)
    assert row.shortfall == 5  # only tag in the pool is the sample's own
    assert len(row.candidates) == 6


def test_invalid_inject_prob_rejected():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    with pytest.raises(ConfigError):
        compose_candidates(samples[0], pool, taxonomy, np.random.default_rng(0), 1.5, 2)


def test_weighted_sampling_prefers_frequent_tags():
    taxonomy = load_builtin_taxonomy()
    heavy = taxonomy.register_open_tag("Heavy", "d")
    light = taxonomy.register_open_tag("Light", "d")
    own = taxonomy.register_open_tag("Own", "d")
    samples = [SampleRecord(id=f"h{i}", modality="text", body="x", labels=(heavy,)) for i in range(50)]
    samples += [SampleRecord(id="l", modality="text", body="x", labels=(light,))]
    me = SampleRecord(id="me", modality="text", body="x", labels=("fixed:life-moments", own))
    pool = build_label_pool(samples + [me])
    rng = np.random.default_rng(0)
    hits = sum(
        heavy in compose_candidates(me, pool, taxonomy, rng, 0.0, 1, weighted=True).candidates
        for _ in range(200)
    )
    assert hits > 150


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**31), inject=st.floats(0.0, 1.0), neg=st.integers(0, 6))
def test_composition_invariants_hold(seed, inject, neg):
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    sample = samples[seed % len(samples)]
    row = compose_candidates(sample, pool, taxonomy, np.random.default_rng(seed), inject, neg)
    # six fixed first, in canonical order
    assert row.candidates[:6] == taxonomy.predefined_ids
    # no duplicates
    assert len(set(row.candidates)) == len(row.candidates)
    # negatives never collide with ground truth
    gt = set(sample.labels)
    for cand, target in zip(row.candidates, row.targets):
        assert target == (1.0 if cand in gt else 0.0)
        if cand not in gt:
            assert cand not in sample.open_labels
    # injection flag consistent with candidate membership
    gt_open = set(sample.open_labels)
    if row.injected:
        assert gt_open <= set(row.candidates)
    else:
        assert not (gt_open & set(row.candidates))


def test_step_batch_collects_rows_and_flags():
    taxonomy, ids, samples = make_world()
    pool = build_label_pool(samples)
    rngs = [np.random.default_rng(i) for i in range(len(samples))]
    batch = compose_step_batch(samples, pool, taxonomy, rngs, 0.5, 2)
    assert len(batch.rows) == len(samples)
    assert batch.injected_flags == tuple(r.injected for r in batch.rows)
