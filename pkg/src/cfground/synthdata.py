"""Deterministic synthetic corpora for desk-scale pipeline verification.

Builds caption/image/parse triples in the ingestion schemas without any real
dataset: captions follow "<modifier> <object> <context phrase>" templates
over a small category universe (including multi-word heads), images carry a
few annotated categories with boxes, and parse results mix in headless and
multi-head failures at a fixed rate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Box, CaptionRecord, ImageAnnotations, ParseResult, ParseStatus

CATEGORIES = [
    "dog", "cat", "person", "car", "bus", "couch", "chair", "bottle",
    "teddy bear", "hot dog", "laptop", "umbrella",
]

MODIFIERS = ["the", "a", "the small", "a large", "the fluffy", "a shiny", "the old"]

CONTEXTS = [
    "on the couch",
    "near the window",
    "next to the table",
    "behind the fence",
    "under the lamp",
    "beside the door",
    "in front of the curtain",
    "holding a cup",
    "wearing a hat",
    "with a red collar",
    "sitting on the rug",
    "leaning against the wall",
    "next to the bookshelf",
    "wrapped in a blanket",
    "with a blue ribbon",
    "beside the plant",
    "under the blanket",
    "near the stairs",
    "with muddy paws",
    "facing the mirror",
]

NO_HEAD_TEXTS = ["running and jumping", "slowly spinning around", "waving while smiling"]
MULTI_HEAD_TEXTS = ["the man and the dog", "a cup and a plate", "the cat and the bird"]


@dataclass(frozen=True)
class FixtureCorpus:
    records: list[CaptionRecord]
    images: dict[str, ImageAnnotations]
    parses: list[ParseResult]


def _random_box(rng: np.random.Generator, width: int, height: int) -> Box:
    x1 = float(rng.integers(0, width - 40))
    y1 = float(rng.integers(0, height - 40))
    w = float(rng.integers(20, min(200, width - int(x1))))
    h = float(rng.integers(20, min(200, height - int(y1))))
    return Box(x1, y1, x1 + w, y1 + h)


def build_fixture_corpus(
    n_captions: int,
    seed: int,
    headless_rate: float = 0.08,
    object_only_rate: float = 0.06,
) -> FixtureCorpus:
    """Build a corpus of n_captions with parses and image annotations."""
    rng = np.random.Generator(np.random.PCG64(seed))
    width, height = 640, 480

    records: list[CaptionRecord] = []
    parses: list[ParseResult] = []
    images: dict[str, ImageAnnotations] = {}

    for i in range(n_captions):
        caption_id = f"cap{i:04d}"
        image_id = f"img{i // 2:04d}"
        category = CATEGORIES[int(rng.integers(0, len(CATEGORIES)))]

        roll = rng.random()
        if roll < headless_rate / 2:
            text = NO_HEAD_TEXTS[int(rng.integers(0, len(NO_HEAD_TEXTS)))]
            status = ParseStatus.NO_HEAD
            span = None
        elif roll < headless_rate:
            text = MULTI_HEAD_TEXTS[int(rng.integers(0, len(MULTI_HEAD_TEXTS)))]
            status = ParseStatus.MULTI_HEAD
            span = None
        elif roll < headless_rate + object_only_rate:
            text = category
            status = ParseStatus.OK
            span = (0, len(category))
        else:
            modifier = MODIFIERS[int(rng.integers(0, len(MODIFIERS)))]
            context = CONTEXTS[int(rng.integers(0, len(CONTEXTS)))]
            text = f"{modifier} {category} {context}"
            start = len(modifier) + 1
            status = ParseStatus.OK
            span = (start, start + len(category))

        if image_id not in images:
            extra = {
                CATEGORIES[int(rng.integers(0, len(CATEGORIES)))]
                for _ in range(int(rng.integers(1, 3)))
            }
            cats = frozenset({category} | extra)
            boxes = {
                cat: tuple(_random_box(rng, width, height) for _ in range(int(rng.integers(1, 4))))
                for cat in sorted(cats)
            }
            images[image_id] = ImageAnnotations(
                image_id=image_id,
                width=width,
                height=height,
                categories=cats,
                category_boxes=boxes,
            )
        else:
            # Second caption on an existing image: reuse a category it has.
            existing = images[image_id]
            if category not in existing.categories:
                category = sorted(existing.categories)[0]
                if status is ParseStatus.OK:
                    if span == (0, len(text)):
                        text = category
                        span = (0, len(category))
                    else:
                        modifier = text[: span[0] - 1]
                        context = text[span[1] + 1 :]
                        text = f"{modifier} {category} {context}".strip()
                        span = (len(modifier) + 1, len(modifier) + 1 + len(category))

        gt_box = images[image_id].category_boxes[
            category if category in images[image_id].category_boxes else sorted(images[image_id].categories)[0]
        ][0]
        records.append(
            CaptionRecord(
                caption_id=caption_id,
                image_id=image_id,
                text=text,
                gt_box=gt_box,
                category=category,
            )
        )
        if status is ParseStatus.OK:
            parses.append(
                ParseResult(
                    caption_id=caption_id,
                    status=status,
                    object_start=span[0],
                    object_end=span[1],
                    head_text=text[span[0] : span[1]],
                )
            )
        else:
            parses.append(ParseResult(caption_id=caption_id, status=status))

    return FixtureCorpus(records=records, images=images, parses=parses)


def write_fixture_files(corpus: FixtureCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write corpus.jsonl, images.jsonl, parses.jsonl into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": out / "corpus.jsonl",
        "images": out / "images.jsonl",
        "parses": out / "parses.jsonl",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for r in corpus.records:
            fh.write(
                json.dumps(
                    {
                        "caption_id": r.caption_id,
                        "image_id": r.image_id,
                        "text": r.text,
                        "bbox": r.gt_box.as_list(),
                        "category": r.category,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(paths["images"], "w", encoding="utf-8") as fh:
        for image_id in sorted(corpus.images):
            ann = corpus.images[image_id]
            fh.write(
                json.dumps(
                    {
                        "image_id": ann.image_id,
                        "width": ann.width,
                        "height": ann.height,
                        "categories": sorted(ann.categories),
                        "boxes": {
                            cat: [b.as_list() for b in boxes]
                            for cat, boxes in sorted(ann.category_boxes.items())
                        },
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(paths["parses"], "w", encoding="utf-8") as fh:
        for p in corpus.parses:
            doc: dict = {"caption_id": p.caption_id, "status": p.status.value}
            if p.status is ParseStatus.OK:
                doc.update(
                    object_start=p.object_start, object_end=p.object_end, head=p.head_text
                )
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    return paths


def default_synonyms() -> dict[str, list[str]]:
    """A small synonym table over the fixture categories."""
    return {
        "dog": ["puppy", "hound"],
        "cat": ["kitten", "tabby"],
        "person": ["man", "woman", "child"],
        "car": ["sedan", "automobile"],
        "bus": ["coach"],
        "couch": ["sofa", "settee"],
        "chair": ["stool", "armchair"],
        "bottle": ["flask"],
        "teddy bear": ["plush bear", "stuffed bear"],
        "hot dog": ["frankfurter"],
        "laptop": ["notebook computer"],
        "umbrella": ["parasol"],
    }
