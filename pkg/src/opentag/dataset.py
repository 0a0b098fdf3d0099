"""Sample manifests: load/save/validate, seeded splits, synthetic generation.

A manifest is line-delimited UTF-8. The first line is a header carrying the
schema version and the hash of the taxonomy the records were validated
against; each following line is one sample:

  id|modality|visual_ref|ocr_text|title|body|labels

Fields are pipe-delimited with backslash escaping (\\\\ \\| \\n \\r), labels
are comma-separated tag ids. Pixel data never appears here: visual_ref points
into an embedding archive or names a stub feature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ArtifactMismatchError, ConfigError, TagNotFoundError, ValidationError
from .keywords import STOPWORDS
from .taxonomy import TagTaxonomy

SCHEMA_VERSION = 1
MODALITIES = ("image", "text")


@dataclass(frozen=True)
class SampleRecord:
    id: str
    modality: str
    visual_ref: str | None = None
    ocr_text: str | None = None
    title: str | None = None
    body: str | None = None
    labels: tuple[str, ...] = ()

    def text_fields(self) -> list[str]:
        return [t for t in (self.ocr_text, self.title, self.body) if t]

    @property
    def open_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.labels if l.startswith("open:"))

    @property
    def predefined_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.labels if l.startswith("fixed:"))


@dataclass(frozen=True)
class Manifest:
    taxonomy_hash: str
    samples: tuple[SampleRecord, ...]
    version: int = SCHEMA_VERSION

    def __len__(self) -> int:
        return len(self.samples)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(text: str) -> str:
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"\\": "\\", "|": "|", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _split_fields(line: str) -> list[str]:
    fields, cur, i = [], [], 0
    while i < len(line):
        ch = line[i]
        if ch == "\\" and i + 1 < len(line):
            cur.append(ch)
            cur.append(line[i + 1])
            i += 2
        elif ch == "|":
            fields.append("".join(cur))
            cur = []
            i += 1
        else:
            cur.append(ch)
            i += 1
    fields.append("".join(cur))
    return fields


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    lines = [f"#v{manifest.version} taxonomy={manifest.taxonomy_hash}"]
    for s in manifest.samples:
        fields = [
            s.id,
            s.modality,
            s.visual_ref or "",
            s.ocr_text or "",
            s.title or "",
            s.body or "",
            ",".join(s.labels),
        ]
        lines.append("|".join(_escape(f) for f in fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class ValidationReport:
    problems: list[tuple[int, str, str]] = field(default_factory=list)  # (line, field, message)

    def add(self, line: int, fieldname: str, message: str) -> None:
        self.problems.append((line, fieldname, message))

    def summary(self) -> str:
        return "\n".join(f"line {ln}, {fn}: {msg}" for ln, fn, msg in self.problems)

    def __bool__(self) -> bool:
        return bool(self.problems)


def _validate_record(s: SampleRecord, lineno: int, taxonomy: TagTaxonomy, report: ValidationReport) -> SampleRecord | None:
    ok = True
    if not s.id:
        report.add(lineno, "id", "empty id")
        ok = False
    if s.modality not in MODALITIES:
        report.add(lineno, "modality", f"expected one of {MODALITIES}, got {s.modality!r}")
        ok = False
    elif s.modality == "image" and not s.visual_ref:
        report.add(lineno, "visual_ref", "image samples need a visual_ref")
        ok = False
    elif s.modality == "text" and not (s.title or s.body):
        report.add(lineno, "title/body", "text samples need a title or a body")
        ok = False
    if not s.labels:
        report.add(lineno, "labels", "labels must be non-empty")
        ok = False
    resolved = []
    for raw in s.labels:
        try:
            resolved.append(taxonomy.resolve(raw))
        except TagNotFoundError as e:
            report.add(lineno, "labels", str(e))
            ok = False
    return replace(s, labels=tuple(resolved)) if ok else None


def load_manifest(path: str | Path, taxonomy: TagTaxonomy, strict: bool = True) -> tuple[Manifest, ValidationReport]:
    """Parse and validate. With strict=True any problem raises ValidationError."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#v"):
        raise ValidationError(f"{path}: missing manifest header line")
    header = lines[0][1:].split()
    try:
        version = int(header[0][1:])
        tax_hash = dict(part.split("=", 1) for part in header[1:])["taxonomy"]
    except (ValueError, KeyError, IndexError) as e:
        raise ValidationError(f"{path}: malformed header {lines[0]!r}") from e
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{path}: unsupported schema version {version}")
    if tax_hash != taxonomy.taxonomy_hash():
        raise ArtifactMismatchError(
            f"{path}: manifest taxonomy hash {tax_hash[:12]}... does not match the loaded registry "
            f"{taxonomy.taxonomy_hash()[:12]}..."
        )

    report = ValidationReport()
    samples: list[SampleRecord] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = _split_fields(raw)
        if len(parts) != 7:
            report.add(lineno, "record", f"expected 7 fields, got {len(parts)}")
            continue
        sid, modality, visual_ref, ocr_text, title, body, labels_raw = (_unescape(p) for p in parts)
        labels = tuple(l for l in labels_raw.split(",") if l)
        record = SampleRecord(
            id=sid,
            modality=modality,
            visual_ref=visual_ref or None,
            ocr_text=ocr_text or None,
            title=title or None,
            body=body or None,
            labels=labels,
        )
        if sid in seen_ids:
            report.add(lineno, "id", f"duplicate id {sid!r}")
            continue
        validated = _validate_record(record, lineno, taxonomy, report)
        if validated is not None:
            seen_ids.add(sid)
            samples.append(validated)
    if strict and report:
        raise ValidationError(f"{path}: {len(report.problems)} invalid records:\n{report.summary()}")
    return Manifest(taxonomy_hash=tax_hash, samples=tuple(samples)), report


def split(manifest: Manifest, ratio: float, seed: int) -> tuple[Manifest, Manifest]:
    """Seeded shuffle then prefix split into (train, validation)."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must lie in (0, 1), got {ratio}")
    n = len(manifest.samples)
    n_train = round(n * ratio)
    if n_train == 0 or n_train == n:
        raise ConfigError(f"split ratio {ratio} leaves an empty side for {n} samples")
    order = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    shuffled = [manifest.samples[i] for i in order]
    head = replace(manifest, samples=tuple(shuffled[:n_train]))
    tail = replace(manifest, samples=tuple(shuffled[n_train:]))
    return head, tail


# --- synthetic data -----------------------------------------------------------

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SynthSpec:
    open_tag_count: int
    samples_per_tag: int
    seed: int = 7

    def __post_init__(self):
        if self.open_tag_count < 1 or self.samples_per_tag < 1:
            raise ConfigError("synthetic spec counts must be >= 1")


def _pseudo_words(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    """Distinct pronounceable tokens that survive the tokenizer untouched."""
    words = []
    while len(words) < count:
        word = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(3)
        )
        if word in taken or word in STOPWORDS:
            continue
        taken.add(word)
        words.append(word)
    return words


def synth_dataset(spec: SynthSpec, taxonomy: TagTaxonomy) -> Manifest:
    """Balanced corpus whose keyword text encodes its tags by construction.

    Each open tag is a single coined word that doubles as its strongest
    signature keyword (so the tag's text embedding and its keyword embedding
    coincide), padded with two more owned signature words; predefined tags are
    signalled by the words of their own display names. Shared filler words add
    benign collisions across tags.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    taken: set[str] = set()
    open_words = _pseudo_words(rng, spec.open_tag_count, taken)
    open_sigs = [_pseudo_words(rng, 2, taken) for _ in range(spec.open_tag_count)]
    fixed_sigs = {
        t.id: [w for w in re.findall(r"[a-z0-9]+", t.display_name.casefold()) if len(w) >= 2]
        for t in taxonomy.predefined
    }
    filler = _pseudo_words(rng, 8, taken)

    open_ids = [taxonomy.register_open_tag(word.capitalize(), "dataset") for word in open_words]

    samples: list[SampleRecord] = []
    for tag_idx, open_id in enumerate(open_ids):
        for j in range(spec.samples_per_tag):
            fixed = taxonomy.predefined[j % len(taxonomy.predefined)]
            words = [open_words[tag_idx]] * 3 + open_sigs[tag_idx] * 3 + fixed_sigs[fixed.id] * 2
            words += [filler[i] for i in rng.choice(len(filler), size=2, replace=False)]
            text = " ".join(words)
            sid = f"synth-{tag_idx:02d}-{j:04d}"
            if j % 2 == 0:
                # images of one category share a visual style, as a frozen
                # backbone would produce
                samples.append(
                    SampleRecord(
                        id=sid,
                        modality="image",
                        visual_ref=f"style-{fixed.id.split(':', 1)[1]}",
                        ocr_text=text,
                        labels=(fixed.id, open_id),
                    )
                )
            else:
                samples.append(
                    SampleRecord(
                        id=sid,
                        modality="text",
                        title=f"{open_words[tag_idx]} {fixed_sigs[fixed.id][0]} summary",
                        body=text,
                        labels=(fixed.id, open_id),
                    )
                )
    return Manifest(taxonomy_hash=taxonomy.taxonomy_hash(), samples=tuple(samples))
