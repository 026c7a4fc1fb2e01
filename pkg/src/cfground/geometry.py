"""Vector similarity, anisotropy estimation, and quantile binning.

The anisotropy of an embedding space is estimated as the mean cosine
similarity over uniformly sampled pairs of embeddings; the resulting
similarity distribution is then cut into K quantile bins whose edges
drive similarity-controlled sampling downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateDistribution,
    DimensionError,
    InsufficientItems,
    ValidationError,
)


@dataclass(frozen=True, eq=False)
class Embedding:
    """A dense real vector; the unit of geometric analysis.

    Values are held as float64 and are immutable. Zero and non-finite
    vectors are rejected at construction.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValidationError("embedding must be a non-empty 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("embedding contains non-finite entries")
        if float(np.linalg.norm(arr)) <= 0.0:
            raise ValidationError("zero vector has no direction")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SimilarityDistribution:
    """Empirical cosine similarities of randomly paired embeddings."""

    samples: tuple[float, ...]
    pair_count: int
    seed: int

    def __post_init__(self) -> None:
        if len(self.samples) != self.pair_count:
            raise ValidationError(
                f"got {len(self.samples)} samples for pair_count {self.pair_count}"
            )
        arr = np.asarray(self.samples)
        if arr.size and (arr.min() < -1.0 or arr.max() > 1.0):
            raise ValidationError("similarity samples must lie in [-1, 1]")


@dataclass(frozen=True)
class BinEdges:
    """K+1 strictly increasing edges; outer edges pinned to 0.0 and 1.0."""

    edges: tuple[float, ...]
    k: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValidationError("need at least 2 bins")
        if len(self.edges) != self.k + 1:
            raise ValidationError(f"expected {self.k + 1} edges, got {len(self.edges)}")
        if self.edges[0] != 0.0 or self.edges[-1] != 1.0:
            raise ValidationError("outer edges must be 0.0 and 1.0")
        if any(a >= b for a, b in zip(self.edges, self.edges[1:])):
            raise ValidationError("edges must be strictly increasing")

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "edges": list(self.edges)})

    @classmethod
    def from_json(cls, text: str) -> "BinEdges":
        doc = json.loads(text)
        return cls(edges=tuple(float(e) for e in doc["edges"]), k=int(doc["k"]))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> "BinEdges":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def cosine(u: Embedding, v: Embedding) -> float:
    """Cosine of the angle between u and v, in [-1, 1].

    Accumulates in float64 and clamps rounding spill at the boundaries;
    identical vectors return exactly 1.0 regardless of rounding.
    """
    if u.dim != v.dim:
        raise DimensionError(f"dimension mismatch: {u.dim} vs {v.dim}")
    a, b = u.values, v.values
    if a is b or np.array_equal(a, b):
        return 1.0
    # Dot of pre-normalized vectors: the norm product of two very small
    # vectors can underflow to zero even though each norm is positive.
    raw = float(np.dot(a / np.linalg.norm(a), b / np.linalg.norm(b)))
    return min(1.0, max(-1.0, raw))


def sample_pairs(
    count_items: int, n_pairs: int, seed: int
) -> list[tuple[int, int]]:
    """Draw n_pairs ordered index pairs (i, j), i != j, uniformly with replacement."""
    if count_items < 2:
        raise InsufficientItems(f"need at least 2 items, got {count_items}")
    if n_pairs < 1:
        raise ValidationError("n_pairs must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    i = rng.integers(0, count_items, size=n_pairs)
    j = rng.integers(0, count_items, size=n_pairs)
    # Redraw j where it collided with i; keeps the pair law uniform over i != j.
    clash = i == j
    while clash.any():
        j[clash] = rng.integers(0, count_items, size=int(clash.sum()))
        clash = i == j
    return list(zip(i.tolist(), j.tolist()))


def anisotropy(
    embeddings: Sequence[Embedding], n_pairs: int, seed: int
) -> tuple[float, SimilarityDistribution]:
    """Mean cosine similarity over uniformly sampled embedding pairs.

    Returns the score together with the full sampled distribution so the
    same draw can be binned and plotted downstream.
    """
    if len(embeddings) < 2:
        raise InsufficientItems(f"need at least 2 embeddings, got {len(embeddings)}")
    dim = embeddings[0].dim
    for e in embeddings:
        if e.dim != dim:
            raise DimensionError(f"mixed dimensions: {dim} vs {e.dim}")
    pairs = sample_pairs(len(embeddings), n_pairs, seed)
    sims = np.empty(n_pairs, dtype=np.float64)
    for idx, (i, j) in enumerate(pairs):
        sims[idx] = cosine(embeddings[i], embeddings[j])
    score = float(np.mean(sims))
    dist = SimilarityDistribution(
        samples=tuple(sims.tolist()), pair_count=n_pairs, seed=seed
    )
    return score, dist


def _quantile_type7(sorted_samples: np.ndarray, q: float) -> float:
    """Quantile by linear interpolation between closest order statistics."""
    n = sorted_samples.size
    pos = q * (n - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_samples[lo] + frac * (sorted_samples[hi] - sorted_samples[lo]))


def bin_edges(distribution: SimilarityDistribution, k: int) -> BinEdges:
    """Partition the similarity distribution into k equal-mass intervals.

    Interior edges are the 1/k ... (k-1)/k sample quantiles; outer edges are
    pinned to 0.0 and 1.0. Tied or out-of-range interior edges make the
    partition unusable and raise DegenerateDistribution.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    if len(distribution.samples) < k:
        raise InsufficientItems(
            f"need at least {k} samples to cut {k} bins, got {len(distribution.samples)}"
        )
    ordered = np.sort(np.asarray(distribution.samples, dtype=np.float64))
    interior = [_quantile_type7(ordered, i / k) for i in range(1, k)]
    edges = (0.0, *interior, 1.0)
    if any(a >= b for a, b in zip(edges, edges[1:])):
        raise DegenerateDistribution(f"tied or out-of-range quantile edges: {edges}")
    return BinEdges(edges=edges, k=k)


def assign_bin(similarity: float, edges: BinEdges) -> int:
    """Bin index in [1, K] for a similarity value.

    Bins are half-open [low, high); the top bin is closed at 1.0 and the
    bottom bin absorbs negative cosines below edges[0].
    """
    if similarity < -1.0 or similarity > 1.0:
        raise ValidationError(f"similarity {similarity} outside [-1, 1]")
    idx = int(np.searchsorted(np.asarray(edges.edges), similarity, side="right"))
    return min(max(idx, 1), edges.k)
