#!/usr/bin/env python3
"""End-to-end desk-scale demo: corpus -> edges -> manifests -> scores -> report.

Runs the full pipeline on a synthetic corpus with the hash-based provider
(anisotropy concentration 0.4, mimicking a contrastive encoder), a constant
ground-truth predictor for the object strategies, and a monotone predictor
for the context strategy, then renders the analysis tables.
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from cfground.cli import run as cli_run
from cfground.synthdata import build_fixture_corpus, default_synonyms, write_fixture_files

PROVIDER = "synthetic:7:32:0.4"


def step(argv) -> None:
    argv = [str(a) for a in argv]
    print(f"$ cfground {' '.join(argv)}")
    code = cli_run(argv)
    if code != 0:
        sys.exit(code)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--captions", type=int, default=50)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    corpus = build_fixture_corpus(args.captions, seed=args.seed)
    paths = write_fixture_files(corpus, root)
    (root / "synonyms.json").write_text(json.dumps(default_synonyms(), indent=2), encoding="utf-8")

    step(["anisotropy", "--corpus", paths["corpus"], "--provider", PROVIDER,
          "--pairs", 5000, "--seed", 1, "--out", root / "dist.json"])
    step(["edges", "--dist", root / "dist.json", "--k", 5, "--out", root / "edges.json"])

    eval_dirs = []
    for strategy in ("object-word", "object-sentence", "context"):
        manifest = root / f"manifest_{strategy}.jsonl"
        step(["generate", "--strategy", strategy, "--k", 5, "--seed", 3,
              "--edges", root / "edges.json", "--corpus", paths["corpus"],
              "--images", paths["images"], "--parses", paths["parses"],
              "--vocab", root / "synonyms.json", "--provider", PROVIDER,
              "--out", manifest])
        predictions = root / f"predictions_{strategy}.jsonl"
        mode = "monotone" if strategy == "context" else "gt"
        subprocess.run(
            [sys.executable, str(Path(__file__).parent / "make_synthetic_predictions.py"),
             "--manifest", str(manifest), "--corpus", str(paths["corpus"]),
             "--mode", mode, "--out", str(predictions)],
            check=True,
        )
        results = root / f"results_{strategy}"
        step(["evaluate", "--manifest", manifest, "--predictions", predictions,
              "--images", paths["images"], "--corpus", paths["corpus"],
              "--threshold", 0.5, "--out", results])
        eval_dirs.append(results)

    report_args = ["report", "--meta", root / "manifest_object-word.meta.json",
                   "--dist", root / "dist.json", "--out", root / "report"]
    for d in eval_dirs:
        report_args += ["--evaluation", d]
    step(report_args)
    print(f"\ndemo artifacts under {root}/")


if __name__ == "__main__":
    main()
