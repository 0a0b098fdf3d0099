import numpy as np
import pytest

from opentag.embedding import (
    ArchiveProvider,
    StubProvider,
    TokenSequence,
    normalize_text,
    read_archive,
    text_key,
    visual_count_key,
    visual_token_key,
    write_archive,
)
from opentag.errors import FormatError, MissingEmbeddingError, ValidationError


def test_stub_text_is_deterministic():
    p = StubProvider(text_dim=32, seed=5)
    a = p.embed_text("a")
    b = p.embed_text("a")
    assert np.array_equal(a.values, b.values)


def test_stub_text_unit_norm():
    p = StubProvider(text_dim=64, seed=1)
    assert abs(np.linalg.norm(p.embed_text("wedding").values) - 1.0) < 1e-9


def test_stub_seeds_decorrelate():
    p1 = StubProvider(text_dim=64, seed=1)
    p2 = StubProvider(text_dim=64, seed=2)
    words = [f"word{i}" for i in range(100)]
    cosines = [float(p1.embed_text(w).values @ p2.embed_text(w).values) for w in words]
    assert abs(np.mean(cosines)) < 0.5


def test_stub_shared_words_correlate():
    # bag-of-words stub: texts sharing words have positive cosine
    p = StubProvider(text_dim=64, seed=3)
    full = p.embed_text("wedding planning")
    part = p.embed_text("wedding")
    other = p.embed_text("quarterly report")
    assert float(full.values @ part.values) > 0.5
    assert abs(float(other.values @ part.values)) < 0.5


def test_stub_no_collisions_over_10000_words():
    p = StubProvider(text_dim=64, seed=0)
    seen = set()
    for i in range(10_000):
        seen.add(p.embed_text(f"w{i}").values.tobytes())
    assert len(seen) == 10_000


def test_stub_rejects_empty_text():
    with pytest.raises(ValidationError):
        StubProvider().embed_text("   ")


def test_stub_visual_deterministic_and_valid():
    p = StubProvider(visual_dim=16, seed=9, visual_tokens=4)
    a = p.embed_visual("img-001")
    b = p.embed_visual("img-001")
    assert np.array_equal(a.array, b.array)
    assert a.validity.all() and a.length == 4 and a.dim == 16


def test_empty_modality_placeholder():
    p = StubProvider(visual_dim=16, visual_tokens=4)
    seq = p.embed_visual("")
    assert not seq.validity.any()
    assert (seq.array == 0.0).all()


def test_normalize_text_rules():
    assert normalize_text("  Hello\t WORLD \n") == "hello world"
    assert normalize_text("Café") == normalize_text("Café")  # NFC


def test_text_key_is_prefixed_sha1():
    key = text_key("Wedding Planning")
    assert key.startswith("text:") and len(key) == 5 + 40


def test_archive_round_trip_and_byte_identity(tmp_path):
    entries = {
        text_key("alpha"): np.arange(8, dtype=np.float32),
        text_key("beta"): np.ones(8, dtype=np.float32),
    }
    p1 = tmp_path / "a.bin"
    write_archive(p1, 8, entries)
    version, dim, loaded = read_archive(p1)
    assert (version, dim) == (1, 8)
    assert set(loaded) == set(entries)
    assert np.array_equal(loaded[text_key("alpha")], entries[text_key("alpha")])

    p2 = tmp_path / "b.bin"
    write_archive(p2, 8, loaded)
    assert p1.read_bytes() == p2.read_bytes()


def test_archive_header_echo(tmp_path):
    path = tmp_path / "two.bin"
    write_archive(path, 8, {text_key("x"): np.zeros(8), text_key("y"): np.ones(8)})
    provider = ArchiveProvider(path)
    assert provider.text_dim == 8 and provider.key_count == 2


def test_archive_truncation_reports_offset(tmp_path):
    path = tmp_path / "t.bin"
    write_archive(path, 4, {text_key("x"): np.zeros(4)})
    blob = path.read_bytes()
    path.write_bytes(blob[:-3])
    with pytest.raises(FormatError) as err:
        read_archive(path)
    assert err.value.byte_offset is not None


def test_archive_bad_magic(tmp_path):
    path = tmp_path / "m.bin"
    write_archive(path, 4, {text_key("x"): np.zeros(4)})
    blob = bytearray(path.read_bytes())
    blob[0] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError):
        read_archive(path)


def test_archive_provider_miss_carries_key(tmp_path):
    path = tmp_path / "p.bin"
    write_archive(path, 4, {text_key("known"): np.zeros(4)})
    provider = ArchiveProvider(path)
    with pytest.raises(MissingEmbeddingError) as err:
        provider.embed_text("unknown")
    assert err.value.key == text_key("unknown")


def test_visual_sequence_round_trip_through_archive(tmp_path):
    stub = StubProvider(text_dim=8, visual_dim=8, seed=2, visual_tokens=3)
    seq = stub.embed_visual("imgX")
    entries = {visual_count_key("imgX"): np.array([3.0, 0, 0, 0, 0, 0, 0, 0], dtype=np.float32)}
    for i in range(seq.length):
        entries[visual_token_key("imgX", i)] = seq.array[i].astype(np.float32)
    path = tmp_path / "v.bin"
    write_archive(path, 8, entries)
    provider = ArchiveProvider(path)
    got = provider.embed_visual("imgX")
    assert got.length == 3 and got.validity.all()
    assert np.array_equal(got.array.astype(np.float32), seq.array.astype(np.float32))


def test_token_sequence_empty_helper():
    seq = TokenSequence.empty(5, 3)
    assert seq.dim == 5 and seq.length == 3 and not seq.any_valid
