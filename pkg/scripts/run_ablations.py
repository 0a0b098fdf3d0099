#!/usr/bin/env python3
"""Run the fusion, loss, and input-enrichment sweeps on a small synthetic set.

Each sweep trains one model per variant under a shared seed and prints a
comparison table. Sized to finish in a few minutes on one core; pass --fast
for a smoke-test-sized run.
"""

import sys
from pathlib import Path

from opentag import cli

OUT = Path("out/ablations")


def main() -> int:
    fast = "--fast" in sys.argv
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = OUT / "data.manifest"
    registry = OUT / "registry.tsv"

    common = [
        "--paths.manifest", str(manifest),
        "--paths.registry", str(registry),
        "--paths.out_dir", str(OUT),
        "--provider.text_dim", "48",
        "--provider.visual_dim", "48",
        "--provider.seed", "7",
        "--provider.visual_tokens", "2",
        "--model.model_dim", "16",
        "--model.heads", "4",
        "--model.seq_len", "8",
        "--model.label_text_mode", "name",
        "--training.lr", "7.0",
        "--training.epochs", "4" if fast else "44",
        "--training.t0", "8000",
        "--training.batch_size", "1",
        "--training.grad_clip", "1.0",
        "--training.inject_prob", "1.0",
        "--training.neg_count", "2",
        "--features.keywords_per_source", "6",
        "--seed", "7",
    ]

    code = cli.main(
        ["synth", "--synth.open_tags", "2", "--synth.samples_per_tag", "20" if fast else "100"] + common
    )
    if code:
        return code

    for dimension in ("fusion", "loss", "enrichment"):
        print(f"\n== ablation: {dimension} ==")
        code = cli.main(["ablate", "--dimension", dimension] + common)
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
