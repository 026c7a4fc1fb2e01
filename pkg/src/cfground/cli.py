"""Pipeline orchestration: anisotropy, edges, generate, evaluate, report, cache.

Every flag can also come from a TOML config file (``--config``), organized
as one table per subcommand; explicit flags override config values, which
override built-in defaults. Each stage writes a ``*.run.json`` summary with
input digests, the effective configuration hash, counts, and timing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import corpus as corpus_mod
from . import evaluation as eval_mod
from . import report as report_mod
from .errors import CfgroundError, ValidationError
from .generator import Strategy, generate_dataset, read_manifest, write_manifest
from .geometry import BinEdges, SimilarityDistribution, anisotropy, bin_edges
from .provider import EmbeddingCache, provider_from_spec, write_cache
from .textnorm import normalize
from .vocab import build_context_vocab, build_object_vocab, load_synonyms

DEFAULTS: dict[str, dict[str, Any]] = {
    "anisotropy": {"pairs": 50_000, "seed": 0, "provider": None, "corpus": None, "out": None},
    "edges": {"k": 5, "dist": None, "out": None},
    "generate": {
        "strategy": None, "k": 5, "seed": 0, "edges": None, "corpus": None,
        "images": None, "parses": None, "vocab": None, "provider": None,
        "out": None, "jobs": 1,
    },
    "evaluate": {
        "manifest": None, "predictions": None, "images": None, "corpus": None,
        "threshold": 0.5, "out": None,
    },
    "report": {"meta": None, "evaluation": [], "dist": None, "out": None},
    "cache": {"corpus": None, "vocab": None, "provider": None, "out": None},
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "anisotropy": ("corpus", "provider", "out"),
    "edges": ("dist", "out"),
    "generate": ("strategy", "edges", "corpus", "images", "parses", "provider", "out"),
    "evaluate": ("manifest", "predictions", "images", "corpus", "out"),
    "report": ("meta", "out"),
    "cache": ("corpus", "provider", "out"),
}


def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _merge_config(subcommand: str, args: argparse.Namespace) -> dict[str, Any]:
    """flag > config-file value > default; missing required keys error."""
    file_values: Mapping[str, Any] = {}
    if args.config:
        with open(args.config, "rb") as fh:
            doc = tomllib.load(fh)
        file_values = doc.get(subcommand, {})
        unknown = set(file_values) - set(DEFAULTS[subcommand])
        if unknown:
            raise ValidationError(
                f"config [{subcommand}] has unknown keys: {sorted(unknown)}"
            )
    merged: dict[str, Any] = {}
    for key, default in DEFAULTS[subcommand].items():
        flag_value = getattr(args, key, None)
        if flag_value not in (None, []):
            merged[key] = flag_value
        elif key in file_values:
            merged[key] = file_values[key]
        else:
            merged[key] = default
    missing = [k for k in REQUIRED[subcommand] if merged.get(k) in (None, [])]
    if missing:
        raise ValidationError(f"{subcommand}: missing required options: {missing}")
    return merged


def _write_run_summary(
    summary_path: Path,
    subcommand: str,
    cfg: Mapping[str, Any],
    input_paths: Mapping[str, str | Path],
    counts: Mapping[str, int],
    started: float,
) -> None:
    inputs = {name: _sha256_file(path) for name, path in sorted(input_paths.items())}
    hashable = json.dumps(
        {"subcommand": subcommand, "flags": {k: str(v) for k, v in sorted(cfg.items())},
         "inputs": inputs},
        sort_keys=True,
    )
    summary = {
        "subcommand": subcommand,
        "flags": {k: str(v) for k, v in sorted(cfg.items())},
        "inputs": inputs,
        "config_hash": hashlib.sha256(hashable.encode("utf-8")).hexdigest(),
        "counts": dict(counts),
        "timing_seconds": round(time.monotonic() - started, 6),
    }
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _load_distribution(path: str | Path) -> SimilarityDistribution:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return SimilarityDistribution(
        samples=tuple(float(s) for s in doc["samples"]),
        pair_count=int(doc["pair_count"]),
        seed=int(doc["seed"]),
    )


def cmd_anisotropy(cfg: Mapping[str, Any]) -> dict[str, int]:
    records = corpus_mod.load_captions(cfg["corpus"])
    texts = [normalize(r.text) for r in records]
    with provider_from_spec(str(cfg["provider"])) as provider:
        embeddings = provider.embed_batch(texts)
        score, dist = anisotropy(embeddings, int(cfg["pairs"]), int(cfg["seed"]))
    doc = {
        "score": score,
        "pair_count": dist.pair_count,
        "seed": dist.seed,
        "provider_identity": provider.identity,
        "samples": list(dist.samples),
    }
    Path(cfg["out"]).write_text(json.dumps(doc) + "\n", encoding="utf-8")
    return {"captions": len(records), "pairs": dist.pair_count}


def cmd_edges(cfg: Mapping[str, Any]) -> dict[str, int]:
    dist = _load_distribution(cfg["dist"])
    edges = bin_edges(dist, int(cfg["k"]))
    edges.write(cfg["out"])
    return {"samples": len(dist.samples), "k": edges.k}


def cmd_generate(cfg: Mapping[str, Any]) -> dict[str, int]:
    records = corpus_mod.load_captions(cfg["corpus"])
    images = corpus_mod.load_image_annotations(cfg["images"])
    parses = corpus_mod.load_parses(cfg["parses"])
    splits, dropped_no_head = corpus_mod.apply_parses(records, parses)
    edges = BinEdges.read(cfg["edges"])
    if edges.k != int(cfg["k"]):
        raise ValidationError(f"edges file has k={edges.k}, flag says k={cfg['k']}")
    strategy = Strategy(str(cfg["strategy"]))
    if strategy is Strategy.CONTEXT:
        vocab = build_context_vocab(splits)
    else:
        if not cfg.get("vocab"):
            raise ValidationError("object strategies need --vocab (synonyms JSON)")
        categories, synonyms = load_synonyms(cfg["vocab"])
        vocab = build_object_vocab(categories, synonyms)
    with provider_from_spec(str(cfg["provider"])) as provider:
        manifest = generate_dataset(
            splits,
            images,
            vocab,
            edges,
            strategy,
            provider,
            seed=int(cfg["seed"]),
            discarded_no_head=dropped_no_head,
            jobs=int(cfg["jobs"]),
        )
    write_manifest(manifest, cfg["out"])
    stats = manifest.stats
    return {
        "initial_captions": stats.initial_captions,
        "discarded_no_head": stats.discarded_no_head,
        "discarded_no_replacement": stats.discarded_no_replacement,
        "retained_captions": stats.retained_captions,
        "samples": len(manifest.samples),
    }


def cmd_evaluate(cfg: Mapping[str, Any]) -> dict[str, int]:
    manifest = read_manifest(cfg["manifest"])
    predictions = eval_mod.load_predictions(cfg["predictions"])
    records = corpus_mod.load_captions(cfg["corpus"])
    captions = {r.caption_id: r for r in records}
    images = corpus_mod.load_image_annotations(cfg["images"])
    result = eval_mod.evaluate(
        manifest, predictions, captions, images, float(cfg["threshold"])
    )
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    eval_mod.write_rows_csv(result.rows, out / "rows.csv")
    report_mod.write_per_bin_csv(result.per_bin, out / "per_bin.csv")
    corr_doc = eval_mod.correlations_to_doc(result)
    corr_doc["strategy"] = manifest.config.strategy.value
    (out / "correlations.json").write_text(
        json.dumps(corr_doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    retained = {row.caption_id for row in result.rows}
    return {"rows": len(result.rows), "retained_captions": len(retained)}


def cmd_report(cfg: Mapping[str, Any]) -> dict[str, int]:
    meta = json.loads(Path(cfg["meta"]).read_text(encoding="utf-8"))
    stats_doc = meta["stats"]
    k = int(meta["config"]["k"])
    stats = {
        "no_head": int(stats_doc["discarded_no_head"]),
        "no_replacement": int(stats_doc["discarded_no_replacement"]),
        "retained": int(stats_doc["retained_captions"]),
        "samples": int(stats_doc["retained_captions"]) * (k + 1),
    }
    per_bin: dict[str, list] = {}
    correlations: dict[str, dict] = {}
    for eval_dir in cfg["evaluation"] or []:
        eval_dir = Path(eval_dir)
        corr = json.loads((eval_dir / "correlations.json").read_text(encoding="utf-8"))
        strategy = corr.pop("strategy", eval_dir.name)
        correlations[strategy] = corr
        table = []
        lines = (eval_dir / "per_bin.csv").read_text(encoding="utf-8").strip().splitlines()
        for line in lines[1:]:
            b, mean, count = line.split(",")
            table.append((int(b), float(mean) if mean else None, int(count)))
        per_bin[strategy] = table
    hist = None
    if cfg.get("dist"):
        dist = _load_distribution(cfg["dist"])
        hist = report_mod.histogram(list(dist.samples), 40, (-1.0, 1.0))
    written = report_mod.render_tables(stats, per_bin, correlations, cfg["out"], hist)
    return {"files": len(written)}


def cmd_cache(cfg: Mapping[str, Any]) -> dict[str, int]:
    records = corpus_mod.load_captions(cfg["corpus"])
    texts = list(dict.fromkeys(normalize(r.text) for r in records))
    if cfg.get("vocab"):
        categories, synonyms = load_synonyms(cfg["vocab"])
        vocab = build_object_vocab(categories, synonyms)
        texts.extend(e.term for e in vocab.entries if e.term not in set(texts))
    with provider_from_spec(str(cfg["provider"])) as provider:
        embeddings = provider.embed_batch(texts)
        cache = EmbeddingCache(dimension=provider.dimension)
        for text, emb in zip(texts, embeddings):
            cache.put(text, emb)
    write_cache(cache, cfg["out"])
    return {"entries": len(cache)}


COMMANDS = {
    "anisotropy": cmd_anisotropy,
    "edges": cmd_edges,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "cache": cmd_cache,
}

# Inputs hashed into each stage's run summary (path-valued config keys).
INPUT_KEYS = {
    "anisotropy": ("corpus",),
    "edges": ("dist",),
    "generate": ("edges", "corpus", "images", "parses", "vocab"),
    "evaluate": ("manifest", "predictions", "images", "corpus"),
    "report": ("meta", "dist"),
    "cache": ("corpus", "vocab"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfground",
        description="Similarity-controlled counterfactual grounding analysis pipeline",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="TOML config file")
        return p

    p = add("anisotropy", "mean random-pair cosine similarity of caption embeddings")
    p.add_argument("--corpus")
    p.add_argument("--provider")
    p.add_argument("--pairs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = add("edges", "quantile bin edges from a similarity distribution")
    p.add_argument("--dist")
    p.add_argument("--k", type=int)
    p.add_argument("--out")

    p = add("generate", "build a counterfactual dataset manifest")
    p.add_argument("--strategy", choices=[s.value for s in Strategy])
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--edges")
    p.add_argument("--corpus")
    p.add_argument("--images")
    p.add_argument("--parses")
    p.add_argument("--vocab")
    p.add_argument("--provider")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")

    p = add("evaluate", "score predictions against a manifest")
    p.add_argument("--manifest")
    p.add_argument("--predictions")
    p.add_argument("--images")
    p.add_argument("--corpus")
    p.add_argument("--threshold", type=float)
    p.add_argument("--out")

    p = add("report", "render csv/svg analysis tables")
    p.add_argument("--meta")
    p.add_argument("--evaluation", action="append")
    p.add_argument("--dist")
    p.add_argument("--out")

    p = add("cache", "embed corpus texts into a binary cache file")
    p.add_argument("--corpus")
    p.add_argument("--vocab")
    p.add_argument("--provider")
    p.add_argument("--out")

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.monotonic()
    sub = args.subcommand
    try:
        cfg = _merge_config(sub, args)
        counts = COMMANDS[sub](cfg)
        out = Path(cfg["out"])
        summary_path = (
            out / "run_summary.json" if out.is_dir() else out.with_name(out.name + ".run.json")
        )
        inputs = {
            key: cfg[key]
            for key in INPUT_KEYS[sub]
            if cfg.get(key) not in (None, []) and Path(str(cfg[key])).is_file()
        }
        if sub == "report":
            for i, eval_dir in enumerate(cfg.get("evaluation") or []):
                inputs[f"evaluation{i}"] = Path(eval_dir) / "correlations.json"
        _write_run_summary(summary_path, sub, cfg, inputs, counts, started)
    except CfgroundError as exc:
        print(f"cfground {sub}: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"cfground {sub}: missing file: {exc}", file=sys.stderr)
        return 2
    print(f"cfground {sub}: ok {json.dumps(counts, sort_keys=True)}")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
