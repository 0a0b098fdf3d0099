"""Cross-component check: the offline exporter's archive serves the core.

Runs the built embed-export CLI (node) over a synthetic manifest, then drives
a full evaluation pass through an archive-backed provider and asserts zero
key misses. Skipped when the exporter has not been built.
"""

import shutil
import subprocess
from pathlib import Path

import pytest

from opentag.dataset import SynthSpec, save_manifest, synth_dataset
from opentag.embedding import ArchiveProvider
from opentag.evaluation import DecisionRule
from opentag.features import FeatureConfig, LabelEmbeddingCache, corpus_stats_for, textual_tokens, visual_tokens
from opentag.head import HeadDims, init_params
from opentag.taxonomy import load_builtin_taxonomy
from opentag.trainer import evaluate_params

EXPORTER_CLI = Path(__file__).parent.parent / "embed-export" / "dist" / "cli.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not EXPORTER_CLI.exists(),
    reason="embed-export is not built (run `npm run build` in embed-export/)",
)


@pytest.fixture(scope="module")
def exported(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("exported")
    taxonomy = load_builtin_taxonomy()
    manifest = synth_dataset(SynthSpec(open_tag_count=2, samples_per_tag=5, seed=21), taxonomy)
    manifest_path = tmp / "data.manifest"
    registry_path = tmp / "registry.tsv"
    archive_path = tmp / "features.bin"
    save_manifest(manifest, manifest_path)
    taxonomy.save_registry(registry_path)
    result = subprocess.run(
        [
            "node", str(EXPORTER_CLI),
            "--manifest", str(manifest_path),
            "--out", str(archive_path),
            "--registry", str(registry_path),
            "--dim", "32",
            "--seed", "4",
            "--visual-tokens", "3",
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0, result.stderr
    return taxonomy, manifest, archive_path


def test_archive_passes_core_validation(exported):
    _, _, archive_path = exported
    provider = ArchiveProvider(archive_path)
    assert provider.text_dim == 32 and provider.visual_dim == 32
    assert provider.key_count > 0


def test_full_evaluation_pass_has_zero_misses(exported):
    taxonomy, manifest, archive_path = exported
    provider = ArchiveProvider(archive_path)
    stats = corpus_stats_for(manifest)
    cfg = FeatureConfig(keywords_per_source=6)
    feature_cache = {
        s.id: (visual_tokens(s, provider), textual_tokens(s, stats, provider, cfg))
        for s in manifest.samples  # raises MissingEmbeddingError on any miss
    }
    for mode in ("name", "name+definition"):
        cache = LabelEmbeddingCache(taxonomy, provider, mode)
        for tag in list(taxonomy.predefined) + list(taxonomy.open_tags):
            cache.vector(tag.id)

    # end to end: an untrained head scores every sample through the archive
    dims = HeadDims(text_dim=32, visual_dim=32, model_dim=8, heads=2, seq_len=8)
    params = init_params(0, dims)
    candidates = taxonomy.predefined_ids + tuple(t.id for t in taxonomy.open_tags)
    cache = LabelEmbeddingCache(taxonomy, provider, "name")
    predictions, truths = evaluate_params(
        params, manifest.samples, candidates, cache, feature_cache, "add",
        DecisionRule(kind="sigmoid", threshold=0.5),
    )
    assert len(predictions) == len(manifest.samples) == len(truths)


def test_exported_vectors_are_normalized(exported):
    _, manifest, archive_path = exported
    provider = ArchiveProvider(archive_path)
    import numpy as np

    vec = provider.embed_text("Tech Frontiers").values
    assert 0.9 <= float(np.linalg.norm(vec)) <= 1.1


def test_exporter_rejects_missing_manifest(tmp_path):
    result = subprocess.run(
        ["node", str(EXPORTER_CLI), "--manifest", str(tmp_path / "nope"), "--out", str(tmp_path / "o.bin")],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode != 0
