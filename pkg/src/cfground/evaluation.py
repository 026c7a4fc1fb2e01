"""Approximation metrics over prediction files.

The object-replacement score is the IoU between the prediction for an
edited caption and the original ground-truth box: high values mean the
model kept grounding the original object despite the counterfactual edit.
The context-replacement score is the maximum IoU against every annotated
box of the caption's category. Scores are joined with the similarity
recorded in the manifest and summarized per bin and by rank correlation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Box, CaptionRecord, ImageAnnotations
from .errors import (
    DegenerateCorrelation,
    DimensionError,
    DuplicateKeyError,
    InsufficientItems,
    JoinError,
    MissingCategoryBoxes,
    MissingPredictionError,
    ParseError,
    ValidationError,
)
from .generator import CounterfactualSample, DatasetManifest, Strategy
from .textnorm import normalize


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    bbox: Box


@dataclass(frozen=True)
class EvaluationRow:
    sample_id: str
    caption_id: str
    bin: int
    similarity: float
    score: float
    strategy: Strategy

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"{self.sample_id}: score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class CorrelationResult:
    pearson: float
    spearman: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValidationError("correlation needs at least 3 points")
        if not (np.isfinite(self.pearson) and np.isfinite(self.spearman)):
            raise ValidationError("correlation coefficients must be finite")


@dataclass(frozen=True)
class EvaluationResult:
    rows: tuple[EvaluationRow, ...]
    per_bin: tuple[tuple[int, float | None, int], ...]
    correlations: CorrelationResult | None
    degenerate_reason: str | None = None
    # Secondary diagnostic: the same coefficients over bin indices.
    bin_index_correlations: CorrelationResult | None = None


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0 when disjoint."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    union = (
        (a.x_max - a.x_min) * (a.y_max - a.y_min)
        + (b.x_max - b.x_min) * (b.y_max - b.y_min)
        - inter
    )
    return inter / union


def object_replacement_score(pred: Box, original_gt: Box) -> float:
    """IoU against the original annotation; high = failure to revise."""
    return iou(pred, original_gt)


def context_replacement_score(pred: Box, category_boxes: Sequence[Box]) -> float:
    """Max IoU against any annotated box of the target category."""
    if not category_boxes:
        raise MissingCategoryBoxes("no boxes for the target category")
    return max(iou(pred, box) for box in category_boxes)


def load_predictions(path: str | Path) -> dict[str, Box]:
    """Read a predictions JSONL file into a sample_id -> box map."""
    predictions: dict[str, Box] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                sample_id = str(doc["sample_id"])
                bbox = doc["bbox"]
                box = Box(*[float(v) for v in bbox])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if sample_id in predictions:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate sample_id {sample_id!r}")
            predictions[sample_id] = box
    return predictions


def filter_by_original(
    samples: Iterable[CounterfactualSample],
    predictions: Mapping[str, Box],
    captions: Mapping[str, CaptionRecord],
    threshold: float = 0.5,
) -> set[str]:
    """Caption ids whose original-caption prediction reaches the threshold.

    The boundary is kept: a prediction with IoU exactly equal to the
    threshold is retained; only strictly lower ones are excluded.
    """
    retained: set[str] = set()
    for sample in samples:
        if sample.kind != "original":
            continue
        pred = predictions.get(sample.sample_id)
        if pred is None:
            raise MissingPredictionError(
                f"no prediction for original sample {sample.sample_id!r}"
            )
        record = captions.get(sample.caption_id)
        if record is None:
            raise JoinError(f"manifest caption {sample.caption_id!r} not in corpus")
        if iou(pred, record.gt_box) >= threshold:
            retained.add(sample.caption_id)
    return retained


def _rank_average_ties(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.float64)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation coefficient."""
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise InsufficientItems("correlation needs at least 3 points")
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(np.sqrt(np.sum(xc * xc)))
    sy = float(np.sqrt(np.sum(yc * yc)))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateCorrelation("zero variance")
    # Exact +/-1 for (anti-)identical centered data regardless of rounding.
    if np.array_equal(xc, yc):
        return 1.0
    if np.array_equal(xc, -yc):
        return -1.0
    r = float(np.sum(xc * yc) / (sx * sy))
    return min(1.0, max(-1.0, r))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation; ties receive their average rank."""
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise InsufficientItems("correlation needs at least 3 points")
    rx = _rank_average_ties(x)
    ry = _rank_average_ties(y)
    try:
        return pearson(rx.tolist(), ry.tolist())
    except DegenerateCorrelation:
        raise DegenerateCorrelation("zero rank variance") from None


def per_bin_mean(
    rows: Sequence[EvaluationRow], k: int
) -> list[tuple[int, float | None, int]]:
    """Arithmetic mean score per bin; empty bins report count 0, mean None."""
    sums = {b: 0.0 for b in range(1, k + 1)}
    counts = {b: 0 for b in range(1, k + 1)}
    for row in rows:
        sums[row.bin] += row.score
        counts[row.bin] += 1
    return [
        (b, (sums[b] / counts[b]) if counts[b] else None, counts[b])
        for b in range(1, k + 1)
    ]


def evaluate(
    manifest: DatasetManifest,
    predictions: Mapping[str, Box],
    captions: Mapping[str, CaptionRecord],
    annotations: Mapping[str, ImageAnnotations],
    threshold: float = 0.5,
) -> EvaluationResult:
    """Score every counterfactual sample of quality-filtered captions.

    Object strategies score against the caption's original ground truth;
    the context strategy scores against every annotated box of the
    caption's category. Correlations between similarity and score are
    reported over raw similarities, with the bin-index variant logged
    alongside; zero-variance outcomes surface as a degenerate reason
    rather than a coefficient.
    """
    strategy = manifest.config.strategy
    retained = filter_by_original(manifest.samples, predictions, captions, threshold)

    rows: list[EvaluationRow] = []
    for sample in manifest.samples:
        if sample.kind != "counterfactual" or sample.caption_id not in retained:
            continue
        pred = predictions.get(sample.sample_id)
        if pred is None:
            raise MissingPredictionError(f"no prediction for sample {sample.sample_id!r}")
        record = captions.get(sample.caption_id)
        if record is None:
            raise JoinError(f"manifest caption {sample.caption_id!r} not in corpus")
        if strategy is Strategy.CONTEXT:
            ann = annotations.get(record.image_id)
            if ann is None:
                raise JoinError(f"no annotations for image {record.image_id!r}")
            boxes = None
            for cat, cat_boxes in ann.category_boxes.items():
                if normalize(cat) == normalize(record.category):
                    boxes = cat_boxes
                    break
            if not boxes:
                raise MissingCategoryBoxes(
                    f"image {record.image_id!r} has no boxes for category "
                    f"{record.category!r} (caption {sample.caption_id!r})"
                )
            score = context_replacement_score(pred, boxes)
        else:
            score = object_replacement_score(pred, record.gt_box)
        rows.append(
            EvaluationRow(
                sample_id=sample.sample_id,
                caption_id=sample.caption_id,
                bin=sample.bin,
                similarity=sample.similarity,
                score=score,
                strategy=strategy,
            )
        )

    table = per_bin_mean(rows, manifest.config.k) if rows else [
        (b, None, 0) for b in range(1, manifest.config.k + 1)
    ]

    correlations = None
    bin_corr = None
    reason = None
    sims = [r.similarity for r in rows]
    scores = [r.score for r in rows]
    try:
        correlations = CorrelationResult(
            pearson=pearson(sims, scores),
            spearman=spearman(sims, scores),
            n=len(rows),
        )
    except (DegenerateCorrelation, InsufficientItems) as exc:
        reason = str(exc)
    if correlations is not None:
        try:
            bins = [float(r.bin) for r in rows]
            bin_corr = CorrelationResult(
                pearson=pearson(bins, scores), spearman=spearman(bins, scores), n=len(rows)
            )
        except (DegenerateCorrelation, InsufficientItems):
            bin_corr = None

    return EvaluationResult(
        rows=tuple(rows),
        per_bin=tuple(table),
        correlations=correlations,
        degenerate_reason=reason,
        bin_index_correlations=bin_corr,
    )


def write_rows_csv(rows: Sequence[EvaluationRow], path: str | Path) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "bin", "similarity", "score"])
        for row in rows:
            writer.writerow(
                [row.sample_id, row.bin, f"{row.similarity:.6f}", f"{row.score:.6f}"]
            )


def correlations_to_doc(result: EvaluationResult) -> dict:
    doc: dict = {
        "pearson": None if result.correlations is None else result.correlations.pearson,
        "spearman": None if result.correlations is None else result.correlations.spearman,
        "n": len(result.rows),
    }
    if result.degenerate_reason is not None:
        doc["degenerate"] = result.degenerate_reason
    if result.bin_index_correlations is not None:
        doc["bin_index_pearson"] = result.bin_index_correlations.pearson
        doc["bin_index_spearman"] = result.bin_index_correlations.spearman
    return doc
