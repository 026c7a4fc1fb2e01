"""Convert raw referring-expression distribution files into pipeline schemas.

Input: the standard refs pickle (a list of referring records, each with an
annotation id, image id, split, category id, and one or more sentences) and
the COCO-format instances JSON (images, annotations with xywh boxes,
categories). Output: corpus.jsonl (one caption per sentence of the selected
splits) and images.jsonl (per-image size, categories, and corner-form boxes).
"""

from __future__ import annotations

import json
import pickle
from pathlib import Path
from typing import Iterable, Mapping


class ConversionError(Exception):
    """Raw file does not match the expected schema; message names the field."""


def _field(record: Mapping, key: str, where: str):
    if key not in record:
        raise ConversionError(f"missing field {key!r} in {where}")
    return record[key]


def _xywh_to_corners(bbox, where: str) -> list[float]:
    if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
        raise ConversionError(f"bbox must have 4 entries in {where}")
    x, y, w, h = (float(v) for v in bbox)
    return [x, y, x + w, y + h]


def _clamp_box(box: list[float], width: float, height: float) -> list[float] | None:
    x1 = min(max(box[0], 0.0), width)
    y1 = min(max(box[1], 0.0), height)
    x2 = min(max(box[2], 0.0), width)
    y2 = min(max(box[3], 0.0), height)
    if x2 <= x1 or y2 <= y1:
        return None
    return [x1, y1, x2, y2]


def convert_raw_datasets(
    refs_path: str | Path,
    instances_path: str | Path,
    out_corpus: str | Path,
    out_images: str | Path,
    splits: Iterable[str] = ("val", "test"),
) -> dict[str, int]:
    """Write corpus and images JSONL files; returns caption/image counts."""
    with open(refs_path, "rb") as fh:
        refs = pickle.load(fh)
    if not isinstance(refs, list):
        raise ConversionError("refs file must contain a list of records")
    instances = json.loads(Path(instances_path).read_text(encoding="utf-8"))

    categories = {
        int(_field(c, "id", "categories")): str(_field(c, "name", "categories"))
        for c in _field(instances, "categories", "instances")
    }
    images_meta = {
        int(_field(im, "id", "images")): im
        for im in _field(instances, "images", "instances")
    }
    annotations = {
        int(_field(a, "id", "annotations")): a
        for a in _field(instances, "annotations", "instances")
    }
    anns_by_image: dict[int, list[Mapping]] = {}
    for ann in annotations.values():
        anns_by_image.setdefault(int(_field(ann, "image_id", "annotations")), []).append(ann)

    wanted = set(splits)
    caption_count = 0
    used_images: set[int] = set()
    corpus_rows: list[dict] = []
    for ref in refs:
        where = f"ref {ref.get('ref_id', '?')}"
        if str(_field(ref, "split", where)) not in wanted:
            continue
        image_id = int(_field(ref, "image_id", where))
        ann = annotations.get(int(_field(ref, "ann_id", where)))
        if ann is None:
            raise ConversionError(f"{where}: ann_id not found in instances")
        image = images_meta.get(image_id)
        if image is None:
            raise ConversionError(f"{where}: image_id not found in instances")
        width = float(_field(image, "width", f"image {image_id}"))
        height = float(_field(image, "height", f"image {image_id}"))
        box = _clamp_box(
            _xywh_to_corners(_field(ann, "bbox", where), where), width, height
        )
        if box is None:
            raise ConversionError(f"{where}: degenerate bounding box")
        category = categories.get(int(_field(ann, "category_id", where)))
        if category is None:
            raise ConversionError(f"{where}: category_id not found in instances")
        for sentence in _field(ref, "sentences", where):
            text = sentence.get("sent") or sentence.get("raw")
            if not text:
                raise ConversionError(f"{where}: sentence without sent/raw text")
            corpus_rows.append(
                {
                    "caption_id": str(_field(sentence, "sent_id", where)),
                    "image_id": str(image_id),
                    "text": str(text),
                    "bbox": box,
                    "category": category,
                }
            )
            caption_count += 1
        used_images.add(image_id)

    with open(out_corpus, "w", encoding="utf-8") as fh:
        for row in corpus_rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")

    with open(out_images, "w", encoding="utf-8") as fh:
        for image_id in sorted(used_images):
            image = images_meta[image_id]
            width = float(_field(image, "width", f"image {image_id}"))
            height = float(_field(image, "height", f"image {image_id}"))
            boxes: dict[str, list[list[float]]] = {}
            for ann in anns_by_image.get(image_id, []):
                category = categories.get(int(_field(ann, "category_id", "annotations")))
                if category is None:
                    raise ConversionError(
                        f"annotation {ann.get('id')}: category_id not found"
                    )
                box = _clamp_box(
                    _xywh_to_corners(_field(ann, "bbox", "annotations"), "annotations"),
                    width,
                    height,
                )
                if box is not None:
                    boxes.setdefault(category, []).append(box)
            fh.write(
                json.dumps(
                    {
                        "image_id": str(image_id),
                        "width": int(width),
                        "height": int(height),
                        "categories": sorted(boxes.keys()),
                        "boxes": {cat: boxes[cat] for cat in sorted(boxes)},
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return {"captions": caption_count, "images": len(used_images)}
