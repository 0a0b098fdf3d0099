import dataclasses

import pytest

from opentag.errors import DuplicateTagError, TagNotFoundError, ValidationError
from opentag.taxonomy import load_builtin_taxonomy

CANONICAL_NAMES = [
    "Career & Business",
    "Life Moments",
    "Creative Design",
    "Learning & Growth",
    "Sports & Health",
    "Tech Frontiers",
]


def test_builtin_has_six_predefined_tags_in_order():
    tax = load_builtin_taxonomy()
    assert [t.display_name for t in tax.predefined] == CANONICAL_NAMES


def test_every_predefined_tag_has_sub_tags():
    tax = load_builtin_taxonomy()
    for tag in tax.predefined:
        assert tag.sub_tags
        assert tag.definition
        assert tag.example_scenarios


def test_tech_frontiers_sub_tags_include_artificial_intelligence():
    tax = load_builtin_taxonomy()
    tech = tax.get("fixed:tech-frontiers")
    assert "Artificial Intelligence" in tech.sub_tags


def test_life_moments_scenarios_include_computer_games():
    tax = load_builtin_taxonomy()
    life = tax.get("fixed:life-moments")
    assert "computer games" in life.example_scenarios


def test_register_open_tag_slug():
    tax = load_builtin_taxonomy()
    assert tax.register_open_tag("Wedding Planning", "user-1") == "open:wedding-planning"


def test_register_is_idempotent_for_same_name_and_origin():
    tax = load_builtin_taxonomy()
    first = tax.register_open_tag("Wedding Planning", "user-1")
    second = tax.register_open_tag("Wedding Planning", "user-1")
    assert first == second
    assert len(tax.open_tags) == 1


def test_register_rejects_eleven_words():
    tax = load_builtin_taxonomy()
    with pytest.raises(ValidationError):
        tax.register_open_tag("one two three four five six seven eight nine ten eleven", "u")


def test_register_rejects_collision_with_predefined():
    tax = load_builtin_taxonomy()
    with pytest.raises(DuplicateTagError):
        tax.register_open_tag("tech frontiers", "u")


def test_register_rejects_case_insensitive_duplicate():
    tax = load_builtin_taxonomy()
    tax.register_open_tag("Wedding Planning", "user-1")
    with pytest.raises(DuplicateTagError):
        tax.register_open_tag("WEDDING planning", "user-2")


def test_resolve_case_insensitive_display_name():
    tax = load_builtin_taxonomy()
    assert tax.resolve("sports & health") == "fixed:sports-health"


def test_resolve_id_passthrough():
    tax = load_builtin_taxonomy()
    tag_id = tax.register_open_tag("Wedding Planning", "u")
    assert tax.resolve("open:wedding-planning") == tag_id


def test_resolve_unknown_reports_nearest():
    tax = load_builtin_taxonomy()
    with pytest.raises(TagNotFoundError):
        tax.resolve("Gardening")


def test_resolve_of_register_is_identity():
    tax = load_builtin_taxonomy()
    tag_id = tax.register_open_tag("Home Remedies", "u")
    assert tax.resolve(tag_id) == tag_id
    assert tax.resolve("home remedies") == tag_id


def test_predefined_tier_is_immutable():
    tax = load_builtin_taxonomy()
    with pytest.raises(dataclasses.FrozenInstanceError):
        tax.predefined[0].display_name = "Renamed"


def test_registry_round_trip(tmp_path):
    tax = load_builtin_taxonomy()
    tax.register_open_tag("Wedding Planning", "user-1")
    tax.register_open_tag("Home Remedies", "dataset")
    path = tmp_path / "registry.tsv"
    tax.save_registry(path)

    reloaded = load_builtin_taxonomy()
    assert reloaded.load_registry(path) == 2
    assert [(t.id, t.display_name) for t in reloaded.open_tags] == [
        (t.id, t.display_name) for t in tax.open_tags
    ]
    assert reloaded.taxonomy_hash() == tax.taxonomy_hash()

    # byte-level stability of a second save
    again = tmp_path / "registry2.tsv"
    reloaded.save_registry(again)
    assert again.read_bytes() == path.read_bytes()


def test_hash_changes_when_registry_changes():
    tax = load_builtin_taxonomy()
    before = tax.taxonomy_hash()
    tax.register_open_tag("Wedding Planning", "u")
    assert tax.taxonomy_hash() != before
