"""Single executable covering the whole workflow.

Subcommands: taxonomy (list / add-open / show), synth, validate, train, eval,
ablate, predict. Every config-file key is also a CLI flag (--section.key), so
file keys and flags stay bijective; OTTER_SEED overrides the file seed and a
flag overrides both.

Exit codes: 0 ok, 1 validation, 2 missing input, 3 artifact mismatch,
4 resolution failure, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import features as feat
from .config import OPTIONS, RunConfig, load_config
from .embedding import make_provider, write_archive
from .errors import (
    ArtifactMismatchError,
    ConfigError,
    DegenerateInputError,
    FormatError,
    MissingEmbeddingError,
    NumericError,
    OpenTagError,
    ShapeError,
    TagNotFoundError,
    ValidationError,
)
from .evaluation import DecisionRule, build_report, format_report, report_records
from .head import load_checkpoint, save_checkpoint
from .taxonomy import TagTaxonomy, load_builtin_taxonomy
from .trainer import evaluate_params, train

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MISSING_INPUT = 2
EXIT_ARTIFACT_MISMATCH = 3
EXIT_RESOLUTION = 4
EXIT_NUMERIC = 5

_EXIT_BY_ERROR: tuple[tuple[type, int], ...] = (
    (ArtifactMismatchError, EXIT_ARTIFACT_MISMATCH),
    (FormatError, EXIT_ARTIFACT_MISMATCH),
    (TagNotFoundError, EXIT_RESOLUTION),
    (MissingEmbeddingError, EXIT_RESOLUTION),
    (NumericError, EXIT_NUMERIC),
    (DegenerateInputError, EXIT_NUMERIC),
    (ShapeError, EXIT_VALIDATION),
    (ConfigError, EXIT_VALIDATION),
    (ValidationError, EXIT_VALIDATION),
    (OpenTagError, EXIT_VALIDATION),
    (FileNotFoundError, EXIT_MISSING_INPUT),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file (key=value sections)")
    parser.add_argument("--seed", help="shortcut for --training.seed")
    for opt in OPTIONS:
        parser.add_argument(opt.flag, dest=opt.name, metavar=opt.type.upper(), help=opt.help)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides = {opt.name: getattr(args, opt.name) for opt in OPTIONS if getattr(args, opt.name, None) is not None}
    if getattr(args, "seed", None) is not None:
        overrides["training.seed"] = args.seed
    return load_config(args.config, overrides)


def _load_taxonomy(cfg: RunConfig) -> TagTaxonomy:
    taxonomy = load_builtin_taxonomy()
    registry = cfg.path("paths.registry")
    if registry is not None and registry.exists():
        taxonomy.load_registry(registry)
    return taxonomy


def _require(cfg: RunConfig, name: str) -> Path:
    path = cfg.path(name)
    if path is None:
        raise FileNotFoundError(f"option {name} is required but not set")
    if not path.exists():
        raise FileNotFoundError(f"{name} does not exist: {path}")
    return path


def cmd_taxonomy(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    taxonomy = _load_taxonomy(cfg)
    if args.action == "list":
        for tag in taxonomy.predefined:
            print(f"{tag.id}\t{tag.display_name}")
        for tag in taxonomy.open_tags:
            print(f"{tag.id}\t{tag.display_name}\t({tag.created_by})")
        return EXIT_OK
    if args.action == "add-open":
        tag_id = taxonomy.register_open_tag(args.name, args.origin)
        registry = cfg.path("paths.registry")
        if registry is not None:
            registry.parent.mkdir(parents=True, exist_ok=True)
            taxonomy.save_registry(registry)
        print(tag_id)
        return EXIT_OK
    # show
    tag_id = taxonomy.resolve(args.name)
    tag = taxonomy.get(tag_id)
    print(f"id: {tag.id}")
    print(f"display name: {tag.display_name}")
    if hasattr(tag, "definition"):
        print(f"definition: {tag.definition}")
        print(f"example scenarios: {'; '.join(tag.example_scenarios)}")
        print(f"sub-tags: {'; '.join(tag.sub_tags)}")
    else:
        print(f"created by: {tag.created_by}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    taxonomy = _load_taxonomy(cfg)
    spec = ds.SynthSpec(
        open_tag_count=int(cfg["synth.open_tags"]),  # type: ignore[arg-type]
        samples_per_tag=int(cfg["synth.samples_per_tag"]),  # type: ignore[arg-type]
        seed=int(cfg["training.seed"]),  # type: ignore[arg-type]
    )
    manifest = ds.synth_dataset(spec, taxonomy)
    out_manifest = cfg.path("paths.manifest")
    if out_manifest is None:
        raise FileNotFoundError("paths.manifest must be set to write the synthetic manifest")
    out_manifest.parent.mkdir(parents=True, exist_ok=True)
    ds.save_manifest(manifest, out_manifest)
    registry = cfg.path("paths.registry")
    if registry is not None:
        registry.parent.mkdir(parents=True, exist_ok=True)
        taxonomy.save_registry(registry)
    archive_path = cfg.path("provider.archive_path")
    if archive_path is not None:
        provider = make_provider(cfg.provider_spec())
        entries = feat.collect_archive_entries(manifest, taxonomy, provider, cfg.feature_config())
        archive_path.parent.mkdir(parents=True, exist_ok=True)
        write_archive(archive_path, provider.text_dim, entries)
        print(f"archive: {archive_path} ({len(entries)} entries)")
    print(f"manifest: {out_manifest} ({len(manifest)} samples)")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    taxonomy = _load_taxonomy(cfg)
    manifest_path = _require(cfg, "paths.manifest")
    manifest, report = ds.load_manifest(manifest_path, taxonomy, strict=False)
    print(f"{len(manifest)} valid samples")
    if report:
        print(report.summary())
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.dry_run:
        print(cfg.dump())
        return EXIT_OK
    taxonomy = _load_taxonomy(cfg)
    provider = make_provider(cfg.provider_spec())
    manifest_path = _require(cfg, "paths.manifest")
    manifest, _ = ds.load_manifest(manifest_path, taxonomy)
    val_manifest = None
    if cfg.path("paths.val_manifest") is not None:
        val_manifest, _ = ds.load_manifest(_require(cfg, "paths.val_manifest"), taxonomy)
    training = cfg.training_config()

    log = print if args.verbose else None
    result = train(manifest, taxonomy, provider, training, val_manifest=val_manifest, log=log)

    out_dir = cfg.path("paths.out_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = str(cfg["model.label_text_mode"])
    save_checkpoint(out_dir / "final.ckpt", result.final_params, training.fusion, mode, result.taxonomy_hash)
    save_checkpoint(out_dir / "best.ckpt", result.best_params, training.fusion, mode, result.taxonomy_hash)
    (out_dir / "trace.csv").write_text("\n".join(result.trace) + "\n", encoding="utf-8")
    p, r, f1 = result.final_metrics
    print(f"final: precision={p:.4f} recall={r:.4f} f1={f1:.4f}")
    p, r, f1 = result.best_metrics
    print(f"best (epoch {result.best_epoch}): precision={p:.4f} recall={r:.4f} f1={f1:.4f}")
    print(f"checkpoints and trace in {out_dir}")
    return EXIT_OK


def _eval_pipeline(cfg: RunConfig, checkpoint_path: Path, rule: DecisionRule, split_groups: bool, per_tag: int | None):
    taxonomy = _load_taxonomy(cfg)
    provider = make_provider(cfg.provider_spec())
    params, fusion, label_text_mode, ckpt_hash = load_checkpoint(checkpoint_path)
    if ckpt_hash != taxonomy.taxonomy_hash():
        raise ArtifactMismatchError(
            f"checkpoint was trained against taxonomy {ckpt_hash[:12]}..., "
            f"loaded registry hashes to {taxonomy.taxonomy_hash()[:12]}..."
        )
    manifest, _ = ds.load_manifest(_require(cfg, "paths.manifest"), taxonomy)
    stats = feat.corpus_stats_for(manifest)
    fcfg = cfg.feature_config()
    feature_cache = {
        s.id: (feat.visual_tokens(s, provider), feat.textual_tokens(s, stats, provider, fcfg))
        for s in manifest.samples
    }
    from .sampler import build_label_pool

    pool = build_label_pool(manifest.samples)
    candidates = taxonomy.predefined_ids + pool.ids
    label_cache = feat.LabelEmbeddingCache(taxonomy, provider, label_text_mode)
    predictions, truths = evaluate_params(params, manifest.samples, candidates, label_cache, feature_cache, fusion, rule)
    report = build_report(
        predictions,
        truths,
        taxonomy=taxonomy,
        split_groups=split_groups,
        top_n_open=per_tag,
        config_echo={"rule": f"{rule.kind}:{rule.threshold}" + (f":k={rule.k}" if rule.kind == "topk" else ""),
                     "checkpoint": checkpoint_path.name},
    )
    return report


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    rule = DecisionRule.parse(args.rule) if args.rule else DecisionRule.parse(str(cfg["eval.rule"]))
    per_tag = args.per_tag if args.per_tag is not None else None
    report = _eval_pipeline(cfg, Path(args.checkpoint), rule, args.split_groups, per_tag)
    print(format_report(report))
    out_dir = cfg.path("paths.out_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "eval-records.tsv"
    records_path.write_text("\n".join(report_records(report)) + "\n", encoding="utf-8")
    print(f"records: {records_path}")
    return EXIT_OK


ABLATION_DIMENSIONS = {
    "fusion": [("cat", {"model.fusion": "cat"}), ("max", {"model.fusion": "max"}),
               ("median", {"model.fusion": "median"}), ("add", {"model.fusion": "add"})],
    "loss": [("bce", {"training.loss": "bce"}), ("asymmetric", {"training.loss": "asymmetric"})],
    "enrichment": [
        ("base", {"features.use_ocr_keywords": "false", "features.use_title_keywords": "false"}),
        ("+ocr-keywords", {"features.use_ocr_keywords": "true", "features.use_title_keywords": "false"}),
        ("+title-keywords", {"features.use_ocr_keywords": "true", "features.use_title_keywords": "true"}),
    ],
}


def cmd_ablate(args: argparse.Namespace) -> int:
    variants = ABLATION_DIMENSIONS[args.dimension]
    taxonomy_loaded = None
    rows = []
    out_dir = None
    for label, overrides in variants:
        merged = dict(overrides)
        cfg = _resolve_config(args)
        for name, value in merged.items():
            cfg.values[name] = value if not isinstance(value, str) else _coerce_for(name, value)
        if taxonomy_loaded is None:
            taxonomy_loaded = _load_taxonomy(cfg)
            out_dir = cfg.path("paths.out_dir")
            out_dir.mkdir(parents=True, exist_ok=True)
        provider = make_provider(cfg.provider_spec())
        manifest, _ = ds.load_manifest(_require(cfg, "paths.manifest"), taxonomy_loaded)
        result = train(manifest, taxonomy_loaded, provider, cfg.training_config())
        rows.append((label, *result.best_metrics))
        slug = label.strip("+").replace(" ", "-")
        (out_dir / f"ablate-{args.dimension}-{slug}.trace.csv").write_text(
            "\n".join(result.trace) + "\n", encoding="utf-8"
        )
    header = {"fusion": "Operation", "loss": "Loss", "enrichment": "Inputs"}[args.dimension]
    print(f"{header:<18} {'Prec.':>7} {'Rec.':>7} {'F1':>7}")
    for label, p, r, f1 in rows:
        print(f"{label:<18} {p:>7.2f} {r:>7.2f} {f1:>7.2f}")
    return EXIT_OK


def _coerce_for(name: str, value: str):
    from .config import _BY_NAME, _coerce

    return _coerce(_BY_NAME[name], value)


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    taxonomy = _load_taxonomy(cfg)
    provider = make_provider(cfg.provider_spec())
    params, fusion, label_text_mode, ckpt_hash = load_checkpoint(Path(args.checkpoint))
    if ckpt_hash != taxonomy.taxonomy_hash():
        raise ArtifactMismatchError(
            f"checkpoint taxonomy {ckpt_hash[:12]}... does not match the loaded registry"
        )
    if args.visual_ref:
        sample = ds.SampleRecord(id="cli-input", modality="image", visual_ref=args.visual_ref, ocr_text=args.ocr_text)
    elif args.title or args.body:
        sample = ds.SampleRecord(id="cli-input", modality="text", title=args.title, body=args.body)
    else:
        raise ValidationError("predict needs --visual-ref (with optional --ocr-text) or --title/--body")

    from .keywords import CorpusStats

    stats = CorpusStats.from_documents([feat.document_terms(sample)])
    fcfg = cfg.feature_config()
    vis = feat.visual_tokens(sample, provider)
    txt = feat.textual_tokens(sample, stats, provider, fcfg)
    candidates = taxonomy.predefined_ids + tuple(t.id for t in taxonomy.open_tags)
    label_cache = feat.LabelEmbeddingCache(taxonomy, provider, label_text_mode)
    from .head import forward

    pred = forward(params, candidates, label_cache.matrix(candidates), vis, txt, fusion)
    threshold = args.threshold if args.threshold is not None else float(cfg["training.threshold"])  # type: ignore[arg-type]
    chosen = []
    for tag_id, prob in zip(pred.candidates, pred.probabilities):
        mark = " *" if prob >= threshold else ""
        print(f"{prob:.4f}  {tag_id}  {taxonomy.display_name(tag_id)}{mark}")
        if prob >= threshold:
            chosen.append(tag_id)
    print("predicted:", ", ".join(chosen) if chosen else "(none)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opentag", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_tax = sub.add_parser("taxonomy", help="inspect and extend the tag space")
    tax_sub = p_tax.add_subparsers(dest="action", required=True)
    p_list = tax_sub.add_parser("list", help="print both tag tiers")
    p_add = tax_sub.add_parser("add-open", help="register an open tag")
    p_add.add_argument("name")
    p_add.add_argument("--origin", default="user")
    p_show = tax_sub.add_parser("show", help="print one tag's details")
    p_show.add_argument("name")
    for p in (p_list, p_add, p_show):
        _add_config_flags(p)
        p.set_defaults(func=cmd_taxonomy)

    p_synth = sub.add_parser("synth", help="generate a synthetic manifest (and optional archive)")
    _add_config_flags(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_val = sub.add_parser("validate", help="validate a manifest against the taxonomy")
    _add_config_flags(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_train = sub.add_parser("train", help="train the tagging head")
    _add_config_flags(p_train)
    p_train.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")
    p_train.add_argument("--verbose", action="store_true", help="print one trace line per epoch")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a manifest")
    _add_config_flags(p_eval)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--rule", help="decision rule, e.g. sigmoid:0.5, cos:17, topk:2:0.01, or a preset")
    p_eval.add_argument("--split-groups", action="store_true", help="add predefined/open group rows")
    p_eval.add_argument("--per-tag", type=int, metavar="N", help="add per-tag rows (N most frequent open tags)")
    p_eval.set_defaults(func=cmd_eval)

    p_abl = sub.add_parser("ablate", help="train one variant per value of a design dimension")
    _add_config_flags(p_abl)
    p_abl.add_argument("--dimension", required=True, choices=sorted(ABLATION_DIMENSIONS))
    p_abl.set_defaults(func=cmd_ablate)

    p_pred = sub.add_parser("predict", help="score one input against all known tags")
    _add_config_flags(p_pred)
    p_pred.add_argument("--checkpoint", required=True)
    p_pred.add_argument("--visual-ref")
    p_pred.add_argument("--ocr-text")
    p_pred.add_argument("--title")
    p_pred.add_argument("--body")
    p_pred.add_argument("--threshold", type=float)
    p_pred.set_defaults(func=cmd_predict)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # noqa: BLE001 - single boundary, mapped to exit codes
        for err_type, code in _EXIT_BY_ERROR:
            if isinstance(e, err_type):
                print(f"error: {e}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
