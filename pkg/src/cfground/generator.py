"""Similarity-controlled counterfactual caption generation.

For each caption, every eligible replacement candidate is scored under the
chosen strategy (term-vs-term, object-edited caption vs. original, or
context-edited caption vs. original), assigned to a similarity bin, and one
candidate per bin is drawn uniformly. Captions that cannot fill every bin
are discarded. The result is a manifest of K counterfactual captions plus
the original per retained caption, with full filtering statistics.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .corpus import SplitCaption
from .errors import GenerationError, ProviderError, SpanError, ValidationError
from .geometry import BinEdges, assign_bin, cosine
from .provider import EmbeddingProvider
from .textnorm import NORMALIZATION_VERSION, hash64, normalize
from .vocab import ContextVocabulary, ObjectVocabulary, eligible_object_candidates


class Strategy(str, Enum):
    OBJECT_WORD = "object-word"
    OBJECT_SENTENCE = "object-sentence"
    CONTEXT = "context"


@dataclass(frozen=True)
class ScoredCandidate:
    replacement_text: str
    category: str | None
    similarity: float
    bin: int
    # Context candidates carry the anchor offset they were extracted with.
    insert_offset: int | None = None


@dataclass(frozen=True)
class DiscardEmptyBin:
    """Sampling outcome when a similarity interval has no candidate."""

    bin: int


@dataclass(frozen=True)
class CounterfactualSample:
    sample_id: str
    caption_id: str
    kind: str  # "original" | "counterfactual"
    strategy: Strategy
    edited_text: str
    bin: int | None = None
    similarity: float | None = None
    replacement_text: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "original":
            if self.bin is not None or self.similarity is not None or self.replacement_text is not None:
                raise ValidationError(f"{self.sample_id}: original samples carry no replacement fields")
        elif self.kind == "counterfactual":
            if self.bin is None or self.similarity is None or self.replacement_text is None:
                raise ValidationError(f"{self.sample_id}: counterfactual samples need bin, similarity, replacement")
        else:
            raise ValidationError(f"{self.sample_id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class GenerationStats:
    initial_captions: int
    discarded_no_head: int
    discarded_no_replacement: int
    retained_captions: int
    discarded_empty_context: int = 0  # subset of discarded_no_replacement

    def __post_init__(self) -> None:
        if (
            self.discarded_no_head + self.discarded_no_replacement + self.retained_captions
            != self.initial_captions
        ):
            raise ValidationError("filtering stats do not add up to the initial count")


@dataclass(frozen=True)
class ManifestConfig:
    strategy: Strategy
    k: int
    seed: int
    edges: BinEdges
    provider_identity: str
    normalization: str = NORMALIZATION_VERSION
    within_bin_choice: str = "uniform"
    candidate_exclusion: str = "annotated-categories+own-term"


@dataclass(frozen=True)
class DatasetManifest:
    config: ManifestConfig
    samples: tuple[CounterfactualSample, ...]
    stats: GenerationStats
    # Histogram of all scored candidate similarities, for observing how the
    # strategy's similarity distribution relates to the caption-pair edges.
    similarity_histogram: tuple[tuple[float, float, int], ...] = ()

    def __post_init__(self) -> None:
        expected = self.stats.retained_captions * (self.config.k + 1)
        if len(self.samples) != expected:
            raise ValidationError(
                f"{len(self.samples)} samples for {self.stats.retained_captions} "
                f"retained captions (expected {expected})"
            )


def splice(caption_text: str, span: tuple[int, int], replacement: str) -> str:
    """Replace a character span and re-normalize the result."""
    start, end = span
    if not (0 <= start <= end <= len(caption_text)):
        raise SpanError(f"span ({start}, {end}) outside text of length {len(caption_text)}")
    return normalize(caption_text[:start] + " " + replacement + " " + caption_text[end:])


def substitute_context(split: SplitCaption, context_text: str, insert_offset: int) -> str:
    """Rebuild the caption with a foreign context around its object."""
    if not (0 <= insert_offset <= len(context_text)):
        raise SpanError(
            f"insert offset {insert_offset} outside context of length {len(context_text)}"
        )
    return normalize(
        context_text[:insert_offset]
        + " "
        + split.object_text
        + " "
        + context_text[insert_offset:]
    )


def candidate_similarity(
    split: SplitCaption,
    candidate_text: str,
    strategy: Strategy,
    provider: EmbeddingProvider,
    insert_offset: int | None = None,
) -> float:
    """Similarity of one replacement candidate under the given strategy."""
    if strategy is Strategy.OBJECT_WORD:
        obj, cand = provider.embed_batch([split.object_text, candidate_text])
        return cosine(cand, obj)
    original = normalize(split.record.text)
    if strategy is Strategy.OBJECT_SENTENCE:
        edited = splice(split.record.text, (split.object_start, split.object_end), candidate_text)
    else:
        if not split.context_text:
            raise ValidationError(
                f"caption {split.record.caption_id!r} has no context to replace"
            )
        offset = split.context_insert_offset if insert_offset is None else insert_offset
        edited = substitute_context(split, candidate_text, offset)
    orig_emb, edit_emb = provider.embed_batch([original, edited])
    return cosine(orig_emb, edit_emb)


def sample_per_bin(
    candidates: Sequence[ScoredCandidate], edges: BinEdges, rng_seed: int
) -> Union[list[ScoredCandidate], DiscardEmptyBin]:
    """One uniformly chosen candidate per bin, or the first empty bin."""
    by_bin: dict[int, list[ScoredCandidate]] = {b: [] for b in range(1, edges.k + 1)}
    for cand in candidates:
        by_bin[cand.bin].append(cand)
    for b in range(1, edges.k + 1):
        if not by_bin[b]:
            return DiscardEmptyBin(bin=b)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    return [by_bin[b][int(rng.integers(0, len(by_bin[b])))] for b in range(1, edges.k + 1)]


def _score_object_candidates(
    split: SplitCaption,
    entries,
    strategy: Strategy,
    provider: EmbeddingProvider,
    edges: BinEdges,
) -> list[ScoredCandidate]:
    if strategy is Strategy.OBJECT_WORD:
        texts = [split.object_text] + [e.term for e in entries]
        embs = provider.embed_batch(texts)
        anchor, rest = embs[0], embs[1:]
    else:
        original = normalize(split.record.text)
        span = (split.object_start, split.object_end)
        texts = [original] + [splice(split.record.text, span, e.term) for e in entries]
        embs = provider.embed_batch(texts)
        anchor, rest = embs[0], embs[1:]
    scored = []
    for entry, emb in zip(entries, rest):
        sim = cosine(emb, anchor)
        scored.append(
            ScoredCandidate(
                replacement_text=entry.term,
                category=entry.category,
                similarity=sim,
                bin=assign_bin(sim, edges),
            )
        )
    return scored


def _score_context_candidates(
    split: SplitCaption,
    entries,
    provider: EmbeddingProvider,
    edges: BinEdges,
) -> list[ScoredCandidate]:
    original = normalize(split.record.text)
    texts = [original] + [
        substitute_context(split, e.text, e.insert_offset) for e in entries
    ]
    embs = provider.embed_batch(texts)
    anchor, rest = embs[0], embs[1:]
    scored = []
    for entry, emb in zip(entries, rest):
        sim = cosine(anchor, emb)
        scored.append(
            ScoredCandidate(
                replacement_text=entry.text,
                category=None,
                similarity=sim,
                bin=assign_bin(sim, edges),
                insert_offset=entry.insert_offset,
            )
        )
    return scored


@dataclass(frozen=True)
class _CaptionOutcome:
    samples: tuple[CounterfactualSample, ...] | None  # None => discarded
    empty_context: bool
    similarities: tuple[float, ...]


def _process_caption(
    split: SplitCaption,
    annotations: Mapping[str, object],
    vocab: ObjectVocabulary | ContextVocabulary,
    edges: BinEdges,
    strategy: Strategy,
    provider: EmbeddingProvider,
    seed: int,
) -> _CaptionOutcome:
    record = split.record
    if strategy is Strategy.CONTEXT:
        if not split.context_text:
            return _CaptionOutcome(None, empty_context=True, similarities=())
        entries = [e for e in vocab.entries if e.text != split.context_text]
        scored = _score_context_candidates(split, entries, provider, edges)
    else:
        ann = annotations.get(record.image_id)
        if ann is None:
            raise GenerationError(f"no annotations for image {record.image_id!r}")
        entries = eligible_object_candidates(split, ann, vocab)
        scored = _score_object_candidates(split, entries, strategy, provider, edges)

    sims = tuple(c.similarity for c in scored)
    chosen = sample_per_bin(scored, edges, hash64(seed, record.caption_id, strategy.value))
    if isinstance(chosen, DiscardEmptyBin):
        return _CaptionOutcome(None, empty_context=False, similarities=sims)

    samples = [
        CounterfactualSample(
            sample_id=f"{record.caption_id}#{strategy.value}#0",
            caption_id=record.caption_id,
            kind="original",
            strategy=strategy,
            edited_text=normalize(record.text),
        )
    ]
    for cand in chosen:
        if strategy is Strategy.CONTEXT:
            edited = substitute_context(split, cand.replacement_text, cand.insert_offset)
        else:
            edited = splice(
                record.text, (split.object_start, split.object_end), cand.replacement_text
            )
        samples.append(
            CounterfactualSample(
                sample_id=f"{record.caption_id}#{strategy.value}#{cand.bin}",
                caption_id=record.caption_id,
                kind="counterfactual",
                strategy=strategy,
                edited_text=edited,
                bin=cand.bin,
                similarity=cand.similarity,
                replacement_text=cand.replacement_text,
            )
        )
    return _CaptionOutcome(tuple(samples), empty_context=False, similarities=sims)


def generate_dataset(
    splits: Sequence[SplitCaption],
    annotations: Mapping[str, object],
    vocab: ObjectVocabulary | ContextVocabulary,
    edges: BinEdges,
    strategy: Strategy,
    provider: EmbeddingProvider,
    seed: int,
    discarded_no_head: int = 0,
    jobs: int = 1,
) -> DatasetManifest:
    """Run the generation protocol over every split caption.

    Per-caption randomness is derived from (seed, caption_id, strategy), so
    results are independent of processing order and of ``jobs``. The
    manifest is assembled in input caption order.
    """
    strategy = Strategy(strategy)

    def work(split: SplitCaption) -> _CaptionOutcome:
        return _process_caption(split, annotations, vocab, edges, strategy, provider, seed)

    done = 0
    outcomes: list[_CaptionOutcome] = []
    try:
        if jobs <= 1:
            for split in splits:
                outcomes.append(work(split))
                done += 1
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for outcome in pool.map(work, splits):
                    outcomes.append(outcome)
                    done += 1
    except ProviderError as exc:
        raise GenerationError(
            f"provider failed after {done}/{len(splits)} captions: {exc}"
        ) from exc

    samples: list[CounterfactualSample] = []
    discarded = 0
    empty_context = 0
    all_sims: list[float] = []
    for outcome in outcomes:
        all_sims.extend(outcome.similarities)
        if outcome.samples is None:
            discarded += 1
            empty_context += outcome.empty_context
        else:
            samples.extend(outcome.samples)

    retained = len(splits) - discarded
    stats = GenerationStats(
        initial_captions=discarded_no_head + len(splits),
        discarded_no_head=discarded_no_head,
        discarded_no_replacement=discarded,
        retained_captions=retained,
        discarded_empty_context=empty_context,
    )
    return DatasetManifest(
        config=ManifestConfig(
            strategy=strategy,
            k=edges.k,
            seed=seed,
            edges=edges,
            provider_identity=provider.identity,
        ),
        samples=tuple(samples),
        stats=stats,
        similarity_histogram=_similarity_histogram(all_sims),
    )


def _similarity_histogram(sims: Sequence[float], n_bins: int = 20) -> tuple[tuple[float, float, int], ...]:
    from .report import histogram

    return tuple(histogram(sims, n_bins, (-1.0, 1.0)))


# --- serialization ---------------------------------------------------------


def _sample_to_doc(s: CounterfactualSample) -> dict:
    doc = {
        "sample_id": s.sample_id,
        "caption_id": s.caption_id,
        "kind": s.kind,
        "strategy": s.strategy.value,
        "edited_text": s.edited_text,
    }
    if s.kind == "counterfactual":
        doc["bin"] = s.bin
        doc["similarity"] = s.similarity
        doc["replacement_text"] = s.replacement_text
    return doc


def meta_path_for(manifest_path: str | Path) -> Path:
    return Path(manifest_path).with_suffix(".meta.json")


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    """Write samples as JSONL plus a .meta.json sidecar with config and stats."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for sample in manifest.samples:
            fh.write(json.dumps(_sample_to_doc(sample), sort_keys=True, ensure_ascii=False) + "\n")
    meta = {
        "config": {
            "strategy": manifest.config.strategy.value,
            "k": manifest.config.k,
            "seed": manifest.config.seed,
            "edges": list(manifest.config.edges.edges),
            "provider_identity": manifest.config.provider_identity,
            "normalization": manifest.config.normalization,
            "within_bin_choice": manifest.config.within_bin_choice,
            "candidate_exclusion": manifest.config.candidate_exclusion,
        },
        "stats": {
            "initial_captions": manifest.stats.initial_captions,
            "discarded_no_head": manifest.stats.discarded_no_head,
            "discarded_no_replacement": manifest.stats.discarded_no_replacement,
            "retained_captions": manifest.stats.retained_captions,
            "discarded_empty_context": manifest.stats.discarded_empty_context,
        },
        "similarity_histogram": [list(row) for row in manifest.similarity_histogram],
    }
    meta_path_for(path).write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def read_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    meta = json.loads(meta_path_for(path).read_text(encoding="utf-8"))
    cfg = meta["config"]
    config = ManifestConfig(
        strategy=Strategy(cfg["strategy"]),
        k=int(cfg["k"]),
        seed=int(cfg["seed"]),
        edges=BinEdges(edges=tuple(float(e) for e in cfg["edges"]), k=int(cfg["k"])),
        provider_identity=cfg["provider_identity"],
        normalization=cfg["normalization"],
        within_bin_choice=cfg.get("within_bin_choice", "uniform"),
        candidate_exclusion=cfg.get("candidate_exclusion", ""),
    )
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            samples.append(
                CounterfactualSample(
                    sample_id=doc["sample_id"],
                    caption_id=doc["caption_id"],
                    kind=doc["kind"],
                    strategy=Strategy(doc["strategy"]),
                    edited_text=doc["edited_text"],
                    bin=doc.get("bin"),
                    similarity=doc.get("similarity"),
                    replacement_text=doc.get("replacement_text"),
                )
            )
    st = meta["stats"]
    stats = GenerationStats(
        initial_captions=int(st["initial_captions"]),
        discarded_no_head=int(st["discarded_no_head"]),
        discarded_no_replacement=int(st["discarded_no_replacement"]),
        retained_captions=int(st["retained_captions"]),
        discarded_empty_context=int(st.get("discarded_empty_context", 0)),
    )
    return DatasetManifest(
        config=config,
        samples=tuple(samples),
        stats=stats,
        similarity_histogram=tuple(
            (float(a), float(b), int(c)) for a, b, c in meta.get("similarity_histogram", [])
        ),
    )
