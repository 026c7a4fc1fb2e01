"""Batch CLIs for the model-backed services: parse, synonyms, serve, convert."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .convert import convert_raw_datasets
from .encoders import CONTRASTIVE, MASKED_LM, EncoderSpec
from .headparse import parse_file
from .synonyms import coco_categories, write_synonyms


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfground-sidecar",
        description="Head parsing, synonym expansion, embedding serving, raw conversion",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("parse", help="extract semantic heads from a corpus JSONL")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--engine", choices=("auto", "spacy", "builtin"), default="auto")

    p = sub.add_parser("synonyms", help="write a category -> terms synonyms JSON")
    p.add_argument("--categories", help="text file, one category per line (default: bundled MS-COCO list)")
    p.add_argument("--out", required=True)
    p.add_argument("--engine", choices=("auto", "wordnet", "builtin"), default="auto")

    p = sub.add_parser("serve", help="serve embeddings over the provider protocol")
    p.add_argument("--family", choices=(MASKED_LM, CONTRASTIVE), required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pooling", choices=("mean_tokens", "first_token"), default="mean_tokens")
    p.add_argument("--transport", choices=("stdio", "tcp"), default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)

    p = sub.add_parser("convert", help="convert raw refs/instances files to pipeline schemas")
    p.add_argument("--refs", required=True)
    p.add_argument("--instances", required=True)
    p.add_argument("--splits", default="val,test")
    p.add_argument("--out-corpus", required=True)
    p.add_argument("--out-images", required=True)

    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.subcommand == "parse":
        counts = parse_file(args.corpus, args.out, engine=args.engine)
        print(json.dumps(counts, sort_keys=True), file=sys.stderr)
        return 0

    if args.subcommand == "synonyms":
        if args.categories:
            categories = [
                line.strip()
                for line in Path(args.categories).read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
        else:
            categories = coco_categories()
        synonyms = write_synonyms(categories, args.out, engine=args.engine)
        total = sum(len(v) for v in synonyms.values())
        print(
            json.dumps({"categories": len(synonyms), "terms": total}, sort_keys=True),
            file=sys.stderr,
        )
        return 0

    if args.subcommand == "serve":
        from .server import serve

        spec = EncoderSpec(
            family=args.family, checkpoint=args.checkpoint, pooling=args.pooling
        )
        serve(spec, transport=args.transport, host=args.host, port=args.port,
              announce=sys.stderr)
        return 0

    if args.subcommand == "convert":
        counts = convert_raw_datasets(
            args.refs,
            args.instances,
            args.out_corpus,
            args.out_images,
            splits=tuple(s.strip() for s in args.splits.split(",") if s.strip()),
        )
        print(json.dumps(counts, sort_keys=True), file=sys.stderr)
        return 0

    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
