"""Declarative run configuration.

One option table drives both the config-file parser (INI-style sections of
key=value pairs) and the CLI override flags (--section.key), keeping file keys
and flags bijective. Resolution order per option: CLI flag, then environment
(seed only, via OTTER_SEED), then config file, then default. Paths in the
file resolve relative to the file's directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from pathlib import Path

from .embedding import ProviderSpec
from .errors import ConfigError
from .features import FeatureConfig
from .trainer import TrainingConfig

SEED_ENV_VAR = "OTTER_SEED"


@dataclass(frozen=True)
class Option:
    section: str
    key: str
    type: str  # "int" | "float" | "bool" | "str" | "path"
    default: object
    help: str

    @property
    def flag(self) -> str:
        return f"--{self.section}.{self.key}"

    @property
    def name(self) -> str:
        return f"{self.section}.{self.key}"


OPTIONS: tuple[Option, ...] = (
    Option("paths", "manifest", "path", None, "training/eval manifest file"),
    Option("paths", "val_manifest", "path", None, "optional held-out manifest (default: seeded split)"),
    Option("paths", "registry", "path", None, "open-tag registry file to load"),
    Option("paths", "out_dir", "path", "out", "directory for checkpoints, traces, reports"),
    Option("provider", "kind", "str", "stub", "embedding provider: stub or archive"),
    Option("provider", "text_dim", "int", 64, "text embedding width (stub)"),
    Option("provider", "visual_dim", "int", 64, "visual embedding width (stub)"),
    Option("provider", "seed", "int", 0, "stub provider seed"),
    Option("provider", "visual_tokens", "int", 8, "pseudo-tokens per stub visual feature"),
    Option("provider", "archive_path", "path", None, "embedding archive (archive provider)"),
    Option("model", "model_dim", "int", 256, "attention model width d"),
    Option("model", "heads", "int", 4, "attention head count"),
    Option("model", "seq_len", "int", 16, "fused key/value sequence length"),
    Option("model", "fusion", "str", "add", "fusion op: add, cat, max, median"),
    Option("model", "label_text_mode", "str", "name+definition", "label text fed to the encoder"),
    Option("training", "lr", "float", 1e-3, "initial learning rate"),
    Option("training", "batch_size", "int", 64, "samples per optimizer step"),
    Option("training", "epochs", "int", 200, "training epochs"),
    Option("training", "t0", "int", 100, "steps in the first cosine cycle"),
    Option("training", "t_mult", "float", 1.0, "cycle length growth factor"),
    Option("training", "eta_min", "float", 0.0, "cosine floor learning rate"),
    Option("training", "inject_prob", "float", 0.5, "probability of injecting true open tags"),
    Option("training", "neg_count", "int", 8, "open-set negatives sampled per step"),
    Option("training", "loss", "str", "bce", "loss: bce or asymmetric"),
    Option("training", "asl_gamma_pos", "float", 0.0, "asymmetric loss positive focusing"),
    Option("training", "asl_gamma_neg", "float", 4.0, "asymmetric loss negative focusing"),
    Option("training", "asl_clip", "float", 0.05, "asymmetric loss probability shift"),
    Option("training", "grad_clip", "float", 0.0, "global gradient-norm clip (0 = off)"),
    Option("training", "val_ratio", "float", 0.1, "held-out fraction when no val manifest"),
    Option("training", "threshold", "float", 0.5, "validation decision threshold"),
    Option("training", "weighted_negatives", "bool", False, "sample negatives by pool frequency"),
    Option("training", "seed", "int", 0, "master seed (init, split, shuffling, sampling)"),
    Option("features", "use_ocr_keywords", "bool", True, "extract keywords from OCR text"),
    Option("features", "use_title_keywords", "bool", True, "extract keywords from titles"),
    Option("features", "keywords_per_source", "int", 8, "top-k keywords per text source"),
    Option("features", "extractor", "str", "tfidf", "keyword ranker: tfidf or textrank"),
    Option("features", "textrank_window", "int", 4, "co-occurrence window"),
    Option("features", "textrank_damping", "float", 0.85, "PageRank damping"),
    Option("features", "textrank_iterations", "int", 100, "PageRank iteration cap"),
    Option("features", "textrank_tolerance", "float", 1e-6, "PageRank convergence delta"),
    Option("eval", "rule", "str", "sigmoid:0.5", "decision rule or preset name"),
    Option("synth", "open_tags", "int", 2, "synthetic open tag count"),
    Option("synth", "samples_per_tag", "int", 100, "synthetic samples per open tag"),
)

_BY_NAME = {opt.name: opt for opt in OPTIONS}


def _coerce(opt: Option, raw: str) -> object:
    try:
        if opt.type == "int":
            return int(raw)
        if opt.type == "float":
            return float(raw)
        if opt.type == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError as e:
        raise ConfigError(f"{opt.name}: cannot parse {raw!r} as {opt.type}") from e


@dataclass
class RunConfig:
    """Fully resolved configuration for one command invocation."""

    values: dict[str, object]
    base_dir: Path

    def __getitem__(self, name: str) -> object:
        return self.values[name]

    def path(self, name: str) -> Path | None:
        raw = self.values.get(name)
        if raw is None:
            return None
        p = Path(str(raw))
        return p if p.is_absolute() else (self.base_dir / p)

    def provider_spec(self) -> ProviderSpec:
        archive = self.path("provider.archive_path")
        return ProviderSpec(
            kind=str(self["provider.kind"]),
            text_dim=int(self["provider.text_dim"]),  # type: ignore[arg-type]
            visual_dim=int(self["provider.visual_dim"]),  # type: ignore[arg-type]
            seed=int(self["provider.seed"]),  # type: ignore[arg-type]
            visual_tokens=int(self["provider.visual_tokens"]),  # type: ignore[arg-type]
            archive_path=str(archive) if archive else None,
        )

    def feature_config(self) -> FeatureConfig:
        v = self.values
        return FeatureConfig(
            use_ocr_keywords=bool(v["features.use_ocr_keywords"]),
            use_title_keywords=bool(v["features.use_title_keywords"]),
            keywords_per_source=int(v["features.keywords_per_source"]),  # type: ignore[arg-type]
            extractor=str(v["features.extractor"]),
            textrank_window=int(v["features.textrank_window"]),  # type: ignore[arg-type]
            textrank_damping=float(v["features.textrank_damping"]),  # type: ignore[arg-type]
            textrank_iterations=int(v["features.textrank_iterations"]),  # type: ignore[arg-type]
            textrank_tolerance=float(v["features.textrank_tolerance"]),  # type: ignore[arg-type]
        )

    def training_config(self) -> TrainingConfig:
        v = self.values
        return TrainingConfig(
            lr=float(v["training.lr"]),  # type: ignore[arg-type]
            batch_size=int(v["training.batch_size"]),  # type: ignore[arg-type]
            epochs=int(v["training.epochs"]),  # type: ignore[arg-type]
            t0=int(v["training.t0"]),  # type: ignore[arg-type]
            t_mult=float(v["training.t_mult"]),  # type: ignore[arg-type]
            eta_min=float(v["training.eta_min"]),  # type: ignore[arg-type]
            inject_prob=float(v["training.inject_prob"]),  # type: ignore[arg-type]
            neg_count=int(v["training.neg_count"]),  # type: ignore[arg-type]
            loss=str(v["training.loss"]),
            asl_gamma_pos=float(v["training.asl_gamma_pos"]),  # type: ignore[arg-type]
            asl_gamma_neg=float(v["training.asl_gamma_neg"]),  # type: ignore[arg-type]
            asl_clip=float(v["training.asl_clip"]),  # type: ignore[arg-type]
            fusion=str(v["model.fusion"]),
            seed=int(v["training.seed"]),  # type: ignore[arg-type]
            grad_clip=float(v["training.grad_clip"]),  # type: ignore[arg-type]
            val_ratio=float(v["training.val_ratio"]),  # type: ignore[arg-type]
            threshold=float(v["training.threshold"]),  # type: ignore[arg-type]
            weighted_negatives=bool(v["training.weighted_negatives"]),
            model_dim=int(v["model.model_dim"]),  # type: ignore[arg-type]
            heads=int(v["model.heads"]),  # type: ignore[arg-type]
            seq_len=int(v["model.seq_len"]),  # type: ignore[arg-type]
            label_text_mode=str(v["model.label_text_mode"]),
            features=self.feature_config(),
        )

    def dump(self) -> str:
        """Effective configuration, one option per line, file-format compatible."""
        lines = []
        section = None
        for opt in OPTIONS:
            if opt.section != section:
                section = opt.section
                lines.append(f"[{section}]")
            value = self.values[opt.name]
            lines.append(f"{opt.key} = {'' if value is None else value}")
        return "\n".join(lines)


def load_config(
    config_path: str | Path | None,
    overrides: dict[str, str] | None = None,
    env: dict[str, str] | None = None,
) -> RunConfig:
    env = os.environ if env is None else env
    values: dict[str, object] = {opt.name: opt.default for opt in OPTIONS}
    base_dir = Path.cwd()

    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"config file not found: {config_path}")
        base_dir = config_path.parent.resolve()
        parser = configparser.ConfigParser()
        parser.read(config_path, encoding="utf-8")
        for section in parser.sections():
            for key, raw in parser.items(section):
                name = f"{section}.{key}"
                opt = _BY_NAME.get(name)
                if opt is None:
                    raise ConfigError(f"{config_path}: unknown option {name!r}")
                values[name] = _coerce(opt, raw)

    if SEED_ENV_VAR in env:
        values["training.seed"] = _coerce(_BY_NAME["training.seed"], env[SEED_ENV_VAR])

    for name, raw in (overrides or {}).items():
        opt = _BY_NAME.get(name)
        if opt is None:
            raise ConfigError(f"unknown option {name!r}")
        values[name] = raw if not isinstance(raw, str) else _coerce(opt, raw)

    return RunConfig(values=values, base_dir=base_dir)
