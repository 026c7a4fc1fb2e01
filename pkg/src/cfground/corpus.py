"""Caption, annotation, and parse ingestion with object/context splitting.

Input files are JSONL, one record per line. Captions carry their
ground-truth box and category; image files carry per-category box sets;
parse files carry the semantic-head span for each caption. Joining parses
onto captions yields the object/context split that generation works on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateKeyError,
    JoinError,
    ParseError,
    ValidationError,
)
from .textnorm import normalize


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in pixel corner form (x_min, y_min, x_max, y_max)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if any(not isinstance(c, (int, float)) or not math.isfinite(c) for c in coords):
            raise ValidationError(f"box coordinates must be finite numbers: {coords}")
        if any(c < 0 for c in coords):
            raise ValidationError(f"box coordinates must be non-negative: {coords}")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValidationError(f"box has non-positive extent: {coords}")

    @classmethod
    def from_xywh(cls, x: float, y: float, w: float, h: float) -> "Box":
        return cls(x, y, x + w, y + h)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class CaptionRecord:
    caption_id: str
    image_id: str
    text: str
    gt_box: Box
    category: str

    def __post_init__(self) -> None:
        if not normalize(self.text):
            raise ValidationError(f"caption {self.caption_id!r} has empty text")
        if not self.category:
            raise ValidationError(f"caption {self.caption_id!r} has empty category")


@dataclass(frozen=True)
class ImageAnnotations:
    image_id: str
    width: int
    height: int
    categories: frozenset[str]
    category_boxes: dict[str, tuple[Box, ...]]

    def __post_init__(self) -> None:
        for cat, boxes in self.category_boxes.items():
            if cat not in self.categories:
                raise ValidationError(
                    f"image {self.image_id!r}: boxes for unlisted category {cat!r}"
                )
            for box in boxes:
                if box.x_max > self.width or box.y_max > self.height:
                    raise ValidationError(
                        f"image {self.image_id!r}: box {box.as_list()} exceeds "
                        f"{self.width}x{self.height}"
                    )


class ParseStatus(str, Enum):
    OK = "ok"
    NO_HEAD = "no_head"
    MULTI_HEAD = "multi_head"


@dataclass(frozen=True)
class ParseResult:
    caption_id: str
    status: ParseStatus
    object_start: int | None = None
    object_end: int | None = None
    head_text: str | None = None

    def __post_init__(self) -> None:
        if self.status is ParseStatus.OK:
            if self.object_start is None or self.object_end is None or self.head_text is None:
                raise ValidationError(
                    f"parse {self.caption_id!r}: ok status requires span and head"
                )
        elif self.object_start is not None or self.object_end is not None:
            raise ValidationError(
                f"parse {self.caption_id!r}: span present on non-ok status"
            )


@dataclass(frozen=True)
class SplitCaption:
    """A caption split into its object span and surrounding context.

    ``object_start``/``object_end`` index the raw caption text;
    ``context_insert_offset`` is the position inside ``context_text`` where
    the object was removed, so the original can be reconstructed and foreign
    contexts can be spliced around the same anchor.
    """

    record: CaptionRecord
    object_text: str
    context_text: str
    object_start: int
    object_end: int
    context_insert_offset: int

    def __post_init__(self) -> None:
        if not self.object_text:
            raise ValidationError(
                f"caption {self.record.caption_id!r}: empty object span"
            )


def split_from_span(record: CaptionRecord, start: int, end: int) -> SplitCaption:
    """Build the object/context split of a caption from a head span."""
    text = record.text
    if not (0 <= start < end <= len(text)):
        raise ValidationError(
            f"caption {record.caption_id!r}: span ({start}, {end}) outside text "
            f"of length {len(text)}"
        )
    object_text = normalize(text[start:end])
    prefix = normalize(text[:start])
    suffix = normalize(text[end:])
    if prefix and suffix:
        context_text = prefix + " " + suffix
    else:
        context_text = prefix or suffix
    return SplitCaption(
        record=record,
        object_text=object_text,
        context_text=context_text,
        object_start=start,
        object_end=end,
        context_insert_offset=len(prefix),
    )


def reinsert_object(context_text: str, insert_offset: int, object_text: str) -> str:
    """Place an object back into a context at its insertion point."""
    return normalize(
        context_text[:insert_offset] + " " + object_text + " " + context_text[insert_offset:]
    )


def _iter_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(doc, dict):
                raise ParseError(f"{path}:{lineno}: expected an object")
            yield lineno, doc


def _box_from_doc(doc: dict, fmt: str, where: str) -> Box:
    bbox = doc.get("bbox")
    if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
        raise ParseError(f"{where}: bbox must be a 4-element array")
    vals = [float(v) for v in bbox]
    if fmt == "xywh":
        return Box.from_xywh(*vals)
    return Box(*vals)


def load_captions(path: str | Path) -> list[CaptionRecord]:
    """Load caption records from JSONL, preserving order.

    An optional leading header line ``{"box_format": "xywh"}`` switches box
    decoding from corner form to (x, y, w, h).
    """
    records: list[CaptionRecord] = []
    box_format = "xyxy"
    for lineno, doc in _iter_jsonl(path):
        if "box_format" in doc and "caption_id" not in doc:
            if doc["box_format"] not in ("xyxy", "xywh"):
                raise ParseError(f"{path}:{lineno}: unknown box_format {doc['box_format']!r}")
            box_format = doc["box_format"]
            continue
        try:
            caption_id = str(doc["caption_id"])
            record = CaptionRecord(
                caption_id=caption_id,
                image_id=str(doc["image_id"]),
                text=str(doc["text"]),
                gt_box=_box_from_doc(doc, box_format, f"{path}:{lineno}"),
                category=str(doc["category"]),
            )
        except KeyError as exc:
            raise ParseError(f"{path}:{lineno}: missing field {exc.args[0]!r}") from exc
        except ValidationError as exc:
            raise ValidationError(
                f"caption {doc.get('caption_id')!r} ({path}:{lineno}): {exc}"
            ) from exc
        records.append(record)
    return records


def load_image_annotations(path: str | Path) -> dict[str, ImageAnnotations]:
    """Load per-image annotation records keyed by image id."""
    images: dict[str, ImageAnnotations] = {}
    for lineno, doc in _iter_jsonl(path):
        try:
            image_id = str(doc["image_id"])
            boxes = {
                str(cat): tuple(Box(*[float(v) for v in b]) for b in blist)
                for cat, blist in dict(doc.get("boxes", {})).items()
            }
            ann = ImageAnnotations(
                image_id=image_id,
                width=int(doc["width"]),
                height=int(doc["height"]),
                categories=frozenset(str(c) for c in doc["categories"]),
                category_boxes=boxes,
            )
        except KeyError as exc:
            raise ParseError(f"{path}:{lineno}: missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if image_id in images:
            raise DuplicateKeyError(f"{path}:{lineno}: duplicate image_id {image_id!r}")
        images[image_id] = ann
    return images


def load_parses(path: str | Path) -> list[ParseResult]:
    """Load parse results from JSONL."""
    parses: list[ParseResult] = []
    for lineno, doc in _iter_jsonl(path):
        try:
            status = ParseStatus(doc["status"])
            parses.append(
                ParseResult(
                    caption_id=str(doc["caption_id"]),
                    status=status,
                    object_start=int(doc["object_start"]) if status is ParseStatus.OK else None,
                    object_end=int(doc["object_end"]) if status is ParseStatus.OK else None,
                    head_text=str(doc["head"]) if status is ParseStatus.OK else None,
                )
            )
        except KeyError as exc:
            raise ParseError(f"{path}:{lineno}: missing field {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return parses


def apply_parses(
    captions: Sequence[CaptionRecord], parses: Sequence[ParseResult]
) -> tuple[list[SplitCaption], int]:
    """Join head parses onto captions; count headless captions as discarded.

    Captions whose parse found a clear head become splits; ``no_head`` and
    ``multi_head`` statuses both land in the single discard count. Every
    caption must have exactly one parse and vice versa.
    """
    by_id: dict[str, ParseResult] = {}
    for parse in parses:
        if parse.caption_id in by_id:
            raise JoinError(f"duplicate parse for caption {parse.caption_id!r}")
        by_id[parse.caption_id] = parse

    splits: list[SplitCaption] = []
    discarded_no_head = 0
    seen = set()
    for record in captions:
        parse = by_id.get(record.caption_id)
        if parse is None:
            raise JoinError(f"caption {record.caption_id!r} has no parse entry")
        seen.add(record.caption_id)
        if parse.status is not ParseStatus.OK:
            discarded_no_head += 1
            continue
        split = split_from_span(record, parse.object_start, parse.object_end)
        if split.object_text != normalize(parse.head_text):
            raise ValidationError(
                f"caption {record.caption_id!r}: span text {split.object_text!r} "
                f"does not match head {parse.head_text!r}"
            )
        splits.append(split)

    orphans = set(by_id) - seen
    if orphans:
        raise JoinError(f"parses without captions: {sorted(orphans)[:5]}")
    return splits, discarded_no_head


def write_captions(records: Sequence[CaptionRecord], path: str | Path) -> None:
    """Serialize caption records back to the JSONL schema (for round-trips)."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
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
