import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cfground.errors import (
    DegenerateDistribution,
    DimensionError,
    InsufficientItems,
    ValidationError,
)
from cfground.geometry import (
    BinEdges,
    Embedding,
    SimilarityDistribution,
    anisotropy,
    assign_bin,
    bin_edges,
    cosine,
    sample_pairs,
)

# Interior edges of the contrastive-encoder reference partition (K=5).
CLIP_STYLE_EDGES = BinEdges(edges=(0.0, 0.303, 0.352, 0.398, 0.459, 1.0), k=5)


def cosine_oracle(u, v):
    """Pure-python dot product / norms, no numpy."""
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return dot / (nu * nv)


finite_vec = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
    min_size=1,
    max_size=16,
).filter(lambda v: math.sqrt(sum(x * x for x in v)) > 1e-6)


class TestEmbedding:
    def test_rejects_zero_vector(self):
        with pytest.raises(ValidationError):
            Embedding(np.zeros(4))

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            Embedding(np.array([1.0, np.nan]))
        with pytest.raises(ValidationError):
            Embedding(np.array([np.inf, 0.0]))

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            Embedding(np.array([]))

    def test_values_immutable(self):
        e = Embedding(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            e.values[0] = 5.0


class TestCosine:
    def test_self_similarity_is_one(self):
        x = Embedding(np.array([0.3, -1.7, 2.9]))
        assert cosine(x, x) == 1.0

    def test_orthogonal(self):
        assert cosine(Embedding([1.0, 0.0]), Embedding([0.0, 1.0])) == 0.0

    def test_hand_computed(self):
        # dot = 2 + 2 + 4 = 8, norms 3 * 3
        c = cosine(Embedding([1.0, 2.0, 2.0]), Embedding([2.0, 1.0, 2.0]))
        assert abs(c - 8.0 / 9.0) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cosine(Embedding([1.0, 2.0]), Embedding([1.0, 2.0, 3.0]))

    @given(st.data())
    def test_symmetry_exact(self, data):
        n = data.draw(st.integers(1, 12))
        elem = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
        u = data.draw(st.lists(elem, min_size=n, max_size=n))
        v = data.draw(st.lists(elem, min_size=n, max_size=n))
        assume(math.sqrt(sum(x * x for x in u)) > 1e-6)
        assume(math.sqrt(sum(x * x for x in v)) > 1e-6)
        a, b = Embedding(u), Embedding(v)
        assert cosine(a, b) == cosine(b, a)

    @given(finite_vec, st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, u, scale):
        a = Embedding(u)
        scaled = Embedding([scale * x for x in u])
        assert abs(cosine(a, scaled) - 1.0) < 1e-12
        other = Embedding(list(reversed(u)))
        assert abs(cosine(scaled, other) - cosine(a, other)) < 1e-12

    @given(finite_vec)
    def test_matches_pure_python_oracle(self, u):
        v = [x + 1.0 for x in u]
        if not any(v):
            return
        got = cosine(Embedding(u), Embedding(v))
        assert abs(got - min(1.0, max(-1.0, cosine_oracle(u, v)))) < 1e-12

    def test_range_clamped(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(200):
            u = rng.standard_normal(8)
            got = cosine(Embedding(u), Embedding(u * 1.0000001))
            assert -1.0 <= got <= 1.0


class TestSamplePairs:
    def test_two_items_only_one_unordered_pair(self):
        pairs = sample_pairs(2, 5, seed=11)
        assert len(pairs) == 5
        assert all(p in ((0, 1), (1, 0)) for p in pairs)

    def test_deterministic(self):
        assert sample_pairs(40, 200, seed=7) == sample_pairs(40, 200, seed=7)

    def test_never_self_paired(self):
        assert all(i != j for i, j in sample_pairs(5, 2000, seed=1))

    def test_insufficient_items(self):
        with pytest.raises(InsufficientItems):
            sample_pairs(1, 10, seed=0)

    def test_uniform_over_pairs(self):
        # Block-cell chi-square style oracle: partition indices into 10 groups
        # and compare each of the 100 (group, group) cells against its
        # binomial expectation within 4 standard deviations.
        n, n_pairs, groups = 1000, 50_000, 10
        size = n // groups
        pairs = sample_pairs(n, n_pairs, seed=20240917)
        counts = np.zeros((groups, groups), dtype=np.int64)
        for i, j in pairs:
            counts[i // size, j // size] += 1
        total_pairs = n * (n - 1)
        for a in range(groups):
            for b in range(groups):
                cell_pairs = size * size - (size if a == b else 0)
                p = cell_pairs / total_pairs
                expected = n_pairs * p
                std = math.sqrt(n_pairs * p * (1.0 - p))
                assert abs(counts[a, b] - expected) <= 4.0 * std


class TestAnisotropy:
    def test_identical_embeddings_score_exactly_one(self):
        embs = [Embedding([0.4, 1.1, -0.2]) for _ in range(10)]
        score, dist = anisotropy(embs, n_pairs=500, seed=3)
        assert score == 1.0
        assert all(s == 1.0 for s in dist.samples)

    def test_score_is_mean_of_samples(self):
        rng = np.random.Generator(np.random.PCG64(5))
        embs = [Embedding(rng.standard_normal(16)) for _ in range(50)]
        score, dist = anisotropy(embs, n_pairs=2000, seed=9)
        assert score == float(np.mean(np.asarray(dist.samples)))

    def test_deterministic(self):
        rng = np.random.Generator(np.random.PCG64(6))
        embs = [Embedding(rng.standard_normal(8)) for _ in range(20)]
        s1, d1 = anisotropy(embs, n_pairs=300, seed=42)
        s2, d2 = anisotropy(embs, n_pairs=300, seed=42)
        assert s1 == s2 and d1.samples == d2.samples

    def test_isotropic_vectors_score_near_zero(self):
        rng = np.random.Generator(np.random.PCG64(8))
        mat = rng.standard_normal((800, 64))
        embs = [Embedding(row / np.linalg.norm(row)) for row in mat]
        score, _ = anisotropy(embs, n_pairs=8000, seed=13)
        assert abs(score) < 0.02

    def test_insufficient(self):
        with pytest.raises(InsufficientItems):
            anisotropy([Embedding([1.0])], n_pairs=5, seed=0)

    def test_mixed_dimensions(self):
        with pytest.raises(DimensionError):
            anisotropy([Embedding([1.0, 0.0]), Embedding([1.0])], n_pairs=5, seed=0)


def dist_of(samples, seed=0):
    return SimilarityDistribution(
        samples=tuple(samples), pair_count=len(samples), seed=seed
    )


class TestBinEdges:
    def test_uniform_samples_give_even_edges(self):
        samples = np.linspace(0.0, 1.0, 100_001)
        edges = bin_edges(dist_of(samples.tolist()), k=5)
        for got, want in zip(edges.edges, (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)):
            assert abs(got - want) < 1e-4

    def test_ten_point_sample_matches_quantile_oracle(self):
        samples = [round(0.1 * i, 10) for i in range(1, 11)]
        edges = bin_edges(dist_of(samples), k=5)
        # Independent oracle: numpy's linear-interpolation quantile.
        want = np.quantile(np.array(samples), [0.2, 0.4, 0.6, 0.8], method="linear")
        for got, expect in zip(edges.edges[1:-1], want):
            assert abs(got - float(expect)) < 1e-12

    def test_tied_samples_degenerate(self):
        with pytest.raises(DegenerateDistribution):
            bin_edges(dist_of([0.5] * 100), k=5)

    def test_negative_mass_degenerate(self):
        # Enough negative cosines push an interior quantile below edge 0.0.
        samples = [-0.9 + 0.001 * i for i in range(500)]
        with pytest.raises(DegenerateDistribution):
            bin_edges(dist_of(samples), k=5)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientItems):
            bin_edges(dist_of([0.1, 0.9]), k=5)

    def test_json_round_trip(self, tmp_path):
        edges = bin_edges(dist_of(np.linspace(0.01, 0.99, 500).tolist()), k=5)
        path = tmp_path / "edges.json"
        edges.write(path)
        assert BinEdges.read(path) == edges

    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(2, 8))
    @settings(max_examples=40, deadline=None)
    def test_quantile_balance(self, seed, k):
        # Each bin gets an equal share of the samples it was cut from,
        # within one sample of interpolation slack.
        rng = np.random.Generator(np.random.PCG64(seed))
        samples = rng.uniform(0.001, 0.999, size=400)
        edges = bin_edges(dist_of(samples.tolist()), k=k)
        n = samples.size
        for b in range(1, k + 1):
            lo, hi = edges.edges[b - 1], edges.edges[b]
            if b < k:
                count = int(np.sum((samples >= lo) & (samples < hi)))
            else:
                count = int(np.sum((samples >= lo) & (samples <= hi)))
            assert math.floor(n / k) - 1 <= count <= math.ceil(n / k) + 1


class TestAssignBin:
    def test_top_closure(self):
        assert assign_bin(1.0, CLIP_STYLE_EDGES) == 5

    def test_negative_goes_to_bin_one(self):
        assert assign_bin(-0.3, CLIP_STYLE_EDGES) == 1

    def test_reference_membership(self):
        # 0.37 sits in [0.352, 0.398)
        assert assign_bin(0.37, CLIP_STYLE_EDGES) == 3

    def test_left_edges_belong_to_their_bin(self):
        for b in range(1, 6):
            assert assign_bin(CLIP_STYLE_EDGES.edges[b - 1], CLIP_STYLE_EDGES) == b

    @given(st.floats(min_value=-1.0, max_value=1.0))
    def test_exactly_one_bin_covers_every_similarity(self, s):
        b = assign_bin(s, CLIP_STYLE_EDGES)
        assert 1 <= b <= 5
        edges = CLIP_STYLE_EDGES.edges
        lo = -1.0 if b == 1 else edges[b - 1]
        hi = 1.0 if b == 5 else edges[b]
        assert lo <= s <= hi
        # Interval membership via a linear-scan oracle agrees.
        scan = 5
        for idx in range(1, 6):
            if s < edges[idx]:
                scan = idx
                break
        assert scan == b

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            assign_bin(1.5, CLIP_STYLE_EDGES)
