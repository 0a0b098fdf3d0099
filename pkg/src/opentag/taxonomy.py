"""Two-tier tag space: six fixed predefined tags plus a registry of open tags.

The predefined tier is code-embedded and immutable at runtime. Open tags are
user- or dataset-defined, registered at runtime, and persisted in a
line-oriented text file (`<id>\\t<display name>\\t<origin>`, one per line).
Tag ids are namespaced slugs: "fixed:<slug>" or "open:<slug>".
"""

from __future__ import annotations

import difflib
import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateTagError, TagNotFoundError, ValidationError

FIXED_PREFIX = "fixed:"
OPEN_PREFIX = "open:"
MAX_OPEN_TAG_WORDS = 10


@dataclass(frozen=True)
class PredefinedTag:
    id: str
    display_name: str
    definition: str
    example_scenarios: tuple[str, ...]
    sub_tags: tuple[str, ...]


@dataclass(frozen=True)
class OpenTag:
    id: str
    display_name: str
    created_by: str


def slugify(name: str) -> str:
    words = re.findall(r"[a-z0-9]+", name.casefold())
    if not words:
        raise ValidationError(f"cannot derive a slug from {name!r}")
    return "-".join(words)


def is_predefined_id(tag_id: str) -> bool:
    return tag_id.startswith(FIXED_PREFIX)


def is_open_id(tag_id: str) -> bool:
    return tag_id.startswith(OPEN_PREFIX)


_PREDEFINED: tuple[PredefinedTag, ...] = (
    PredefinedTag(
        id="fixed:career-business",
        display_name="Career & Business",
        definition=(
            "Encompasses market analysis, corporate strategy, financial management, "
            "human resources, product development, marketing strategies, supply chain "
            "management, customer relations, entrepreneurship, and international business."
        ),
        example_scenarios=("Annual reports", "financial statements", "industry trends"),
        sub_tags=(
            "Market Analysis",
            "Corporate Strategy",
            "Financial Management",
            "Human Resources",
            "Product Development",
            "Marketing Strategies",
            "Supply Chain Management",
            "Customer Relations",
            "Entrepreneurship",
            "International Business",
            "Annual Reports",
            "Financial Statements",
            "Industry Trends",
            "Data Analysis",
        ),
    ),
    PredefinedTag(
        id="fixed:life-moments",
        display_name="Life Moments",
        definition=(
            "Captures moments from personal life, including family activities, travel "
            "experiences, culinary exploration, holiday celebrations, and personal "
            "achievements, reflecting the richness and diversity of daily living."
        ),
        example_scenarios=("Food and entertainment", "holidays", "important schedules", "computer games"),
        sub_tags=(
            "Everyday Life",
            "Family Life",
            "Travel Experiences",
            "Culinary Exploration",
            "Festival Celebrations",
            "Daily Life",
            "Food and Entertainment",
            "Travel Guides",
            "Game Screenshots",
            "WeChat Chat Screenshots",
            "Cards and Certificates",
        ),
    ),
    PredefinedTag(
        id="fixed:creative-design",
        display_name="Creative Design",
        definition=(
            "Focuses on creative thinking, design theory, art appreciation, case studies "
            "in design, and analysis of popular trends, aimed at sparking creativity and "
            "providing design inspiration."
        ),
        example_scenarios=("Outfit design", "fashion design"),
        sub_tags=(
            "Inspirational Design",
            "Creative Thinking",
            "Artworks",
            "Artwork Appreciation",
            "Design Case Studies",
            "Fashion Trends",
            "Design Inspiration",
            "Outfit Design",
            "Fashion Design",
            "Illustration Styles",
            "3D Art",
        ),
    ),
    PredefinedTag(
        id="fixed:learning-growth",
        display_name="Learning & Growth",
        definition=(
            "Includes educational news, learning resources, skill training, personal "
            "development strategies, career planning, and self-improvement, designed to "
            "support lifelong learning and personal growth."
        ),
        example_scenarios=("Career advancement", "error notebooks"),
        sub_tags=(
            "Learning and Growth",
            "Educational Information",
            "Learning Resources",
            "Skills Training Posters",
            "Career Planning",
            "Self-Improvement",
            "Workplace Advancement",
            "Error Books",
            "Exam Papers",
            "Homework Questions",
            "Attending Classes",
            "Work Skills",
        ),
    ),
    PredefinedTag(
        id="fixed:sports-health",
        display_name="Sports & Health",
        definition=(
            "Covers healthy eating, fitness, mental health, disease prevention, wellness "
            "habits, and medical information, aimed at promoting a healthy lifestyle and "
            "improving quality of life."
        ),
        example_scenarios=("Health check reports", "fitness activities", "medical treatments"),
        sub_tags=(
            "Sports and Healthcare",
            "Healthy Diet Therapy",
            "Sports and Fitness",
            "Mental Health",
            "Disease Prevention",
            "Healthy Habits",
            "Medical Information",
            "Healthy Lifestyles",
            "Improving Quality of Life",
            "Medical Examination Reports",
            "Disease Treatment",
        ),
    ),
    PredefinedTag(
        id="fixed:tech-frontiers",
        display_name="Tech Frontiers",
        definition=(
            "Content related to the latest technological inventions, innovations, "
            "scientific research progress, future trend forecasts, and practical "
            "applications, especially breakthrough technologies that may have a "
            "significant impact on industries or society."
        ),
        example_scenarios=("Electrical vehicles", "artificial intelligence", "digital products"),
        sub_tags=(
            "Frontiers of Technology",
            "Technological Inventions",
            "Technological Innovations",
            "Scientific Research Progress",
            "Technology Forecasts",
            "Technology Application Cases",
            "Breakthrough Technologies",
            "New Energy Vehicles",
            "Artificial Intelligence",
            "Digital Products",
            "New Scientific Discoveries",
            "Internet and Cybersecurity",
            "Aerospace and Advanced Manufacturing",
            "Life Sciences and Medical Technology",
            "Clean Energy and Sustainable Development",
            "Military Technology",
        ),
    ),
)


class TagTaxonomy:
    """Predefined tags in canonical order plus a mutable open-tag registry.

    Registry mutations follow a single-writer contract; reads of the
    predefined tier and of a finished registry are safe from any thread.
    """

    def __init__(self) -> None:
        self.predefined: tuple[PredefinedTag, ...] = _PREDEFINED
        self._open: dict[str, OpenTag] = {}

    @property
    def open_tags(self) -> tuple[OpenTag, ...]:
        return tuple(self._open.values())

    @property
    def predefined_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.predefined)

    def register_open_tag(self, name: str, origin: str) -> str:
        name = name.strip()
        if not name:
            raise ValidationError("open tag name must be non-empty")
        if len(name.split()) > MAX_OPEN_TAG_WORDS:
            raise ValidationError(
                f"open tag name {name!r} has more than {MAX_OPEN_TAG_WORDS} words"
            )
        folded = name.casefold()
        for fixed in self.predefined:
            if fixed.display_name.casefold() == folded:
                raise DuplicateTagError(f"{name!r} collides with predefined tag {fixed.display_name!r}")
        tag_id = OPEN_PREFIX + slugify(name)
        existing = self._open.get(tag_id)
        if existing is not None:
            if existing.display_name.casefold() == folded and existing.created_by == origin:
                return existing.id  # idempotent re-registration
            raise DuplicateTagError(
                f"{name!r} collides with existing open tag {existing.display_name!r} ({existing.id})"
            )
        for tag in self._open.values():
            if tag.display_name.casefold() == folded:
                raise DuplicateTagError(f"{name!r} collides with existing open tag {tag.display_name!r}")
        self._open[tag_id] = OpenTag(id=tag_id, display_name=name, created_by=origin)
        return tag_id

    def get(self, tag_id: str) -> PredefinedTag | OpenTag:
        for fixed in self.predefined:
            if fixed.id == tag_id:
                return fixed
        tag = self._open.get(tag_id)
        if tag is None:
            raise TagNotFoundError(f"unknown tag id {tag_id!r}")
        return tag

    def display_name(self, tag_id: str) -> str:
        return self.get(tag_id).display_name

    def resolve(self, name_or_id: str) -> str:
        """Case-insensitive exact lookup by display name, or id passthrough."""
        query = name_or_id.strip()
        if query.startswith((FIXED_PREFIX, OPEN_PREFIX)):
            all_ids = set(self.predefined_ids) | set(self._open)
            if query in all_ids:
                return query
        folded = query.casefold()
        for fixed in self.predefined:
            if fixed.display_name.casefold() == folded or fixed.id == folded:
                return fixed.id
        for tag in self._open.values():
            if tag.display_name.casefold() == folded or tag.id == folded:
                return tag.id
        names = [t.display_name for t in self.predefined] + [t.display_name for t in self._open.values()]
        near = difflib.get_close_matches(query, names, n=3)
        raise TagNotFoundError(
            f"unknown tag {name_or_id!r}" + (f"; closest names: {', '.join(near)}" if near else ""),
            suggestions=near,
        )

    def taxonomy_hash(self) -> str:
        """Stable digest over both tiers; changes when the registry changes."""
        h = hashlib.sha1()
        for fixed in self.predefined:
            h.update(f"{fixed.id}\t{fixed.display_name}\n".encode("utf-8"))
        for tag_id in sorted(self._open):
            tag = self._open[tag_id]
            h.update(f"{tag.id}\t{tag.display_name}\n".encode("utf-8"))
        return h.hexdigest()

    def save_registry(self, path: str | Path) -> None:
        lines = [f"{t.id}\t{t.display_name}\t{t.created_by}" for t in self._open.values()]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    def load_registry(self, path: str | Path) -> int:
        """Merge open tags from a registry file; returns how many were loaded."""
        count = 0
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not raw.strip():
                continue
            parts = raw.split("\t")
            if len(parts) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
            tag_id, display, origin = parts
            if not tag_id.startswith(OPEN_PREFIX):
                raise ValidationError(f"{path}:{lineno}: registry may only contain open tags, got {tag_id!r}")
            got = self.register_open_tag(display, origin)
            if got != tag_id:
                raise ValidationError(f"{path}:{lineno}: id {tag_id!r} does not match derived id {got!r}")
            count += 1
        return count


def load_builtin_taxonomy() -> TagTaxonomy:
    """The six predefined tags with an empty open-tag registry."""
    return TagTaxonomy()
