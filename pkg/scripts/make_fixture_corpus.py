#!/usr/bin/env python3
"""Emit a synthetic corpus (corpus/images/parses JSONL + synonyms.json)."""

import argparse
import json
from pathlib import Path

from cfground.synthdata import build_fixture_corpus, default_synonyms, write_fixture_files


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--captions", type=int, default=50)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", required=True, help="output directory")
    args = ap.parse_args()

    corpus = build_fixture_corpus(args.captions, seed=args.seed)
    paths = write_fixture_files(corpus, args.out)
    synonyms_path = Path(args.out) / "synonyms.json"
    synonyms_path.write_text(json.dumps(default_synonyms(), indent=2) + "\n", encoding="utf-8")
    for name, path in {**paths, "synonyms": synonyms_path}.items():
        print(f"{name}: {path}")


if __name__ == "__main__":
    main()
