import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfground.corpus import Box, CaptionRecord, ImageAnnotations, split_from_span
from cfground.errors import EmptyVocabulary, ValidationError
from cfground.vocab import (
    ContextEntry,
    VocabEntry,
    build_context_vocab,
    build_object_vocab,
    dump_context_vocab,
    dump_object_vocab,
    eligible_object_candidates,
    load_synonyms,
)

# The 80 MS-COCO categories; used as a realistic category universe.
COCO_CATEGORIES = [
    "person", "bicycle", "car", "motorcycle", "airplane", "bus", "train",
    "truck", "boat", "traffic light", "fire hydrant", "stop sign",
    "parking meter", "bench", "bird", "cat", "dog", "horse", "sheep", "cow",
    "elephant", "bear", "zebra", "giraffe", "backpack", "umbrella", "handbag",
    "tie", "suitcase", "frisbee", "skis", "snowboard", "sports ball", "kite",
    "baseball bat", "baseball glove", "skateboard", "surfboard",
    "tennis racket", "bottle", "wine glass", "cup", "fork", "knife", "spoon",
    "bowl", "banana", "apple", "sandwich", "orange", "broccoli", "carrot",
    "hot dog", "pizza", "donut", "cake", "chair", "couch", "potted plant",
    "bed", "dining table", "toilet", "tv", "laptop", "mouse", "remote",
    "keyboard", "cell phone", "microwave", "oven", "toaster", "sink",
    "refrigerator", "book", "clock", "vase", "scissors", "teddy bear",
    "hair drier", "toothbrush",
]


def split_for(text, start, end, image="i1", category="dog", cid="c1"):
    record = CaptionRecord(cid, image, text, Box(0, 0, 10, 10), category)
    return split_from_span(record, start, end)


def image_with(categories, image="i1"):
    return ImageAnnotations(
        image_id=image,
        width=640,
        height=480,
        categories=frozenset(categories),
        category_boxes={},
    )


class TestBuildObjectVocab:
    def test_union_semantics(self):
        vocab = build_object_vocab(["dog"], {"dog": ["puppy", "canine"]})
        assert len(vocab) == 3
        assert all(e.category == "dog" for e in vocab.entries)
        assert [e.term for e in vocab.entries] == ["dog", "puppy", "canine"]

    def test_collision_keeps_first_occurrence(self):
        vocab = build_object_vocab(["cat", "dog"], {"dog": ["cat", "puppy"]})
        terms = {e.term: e.category for e in vocab.entries}
        assert terms["cat"] == "cat"
        assert terms["puppy"] == "dog"

    def test_empty_categories_rejected(self):
        with pytest.raises(EmptyVocabulary):
            build_object_vocab([], {})

    def test_normalization_applied(self):
        vocab = build_object_vocab(["Teddy  Bear"], {"Teddy  Bear": ["PLUSH toy"]})
        assert [e.term for e in vocab.entries] == ["teddy bear", "plush toy"]

    def test_full_category_list_has_at_least_its_own_size(self):
        vocab = build_object_vocab(
            COCO_CATEGORIES, {"dog": ["puppy"], "couch": ["sofa", "settee"]}
        )
        assert len(vocab) >= len(COCO_CATEGORIES)

    def test_deterministic_ordering(self):
        a = build_object_vocab(["dog", "cat"], {"cat": ["kitty"]})
        b = build_object_vocab(["dog", "cat"], {"cat": ["kitty"]})
        assert a == b


class TestBuildContextVocab:
    def test_duplicates_collapse(self):
        splits = [
            split_for("dog on the couch", 0, 3, cid="a"),
            split_for("cat on the couch", 0, 3, cid="b"),
        ]
        vocab = build_context_vocab(splits)
        assert len(vocab) == 1
        assert vocab.entries[0] == ContextEntry("on the couch", 0)

    def test_empty_context_excluded(self):
        splits = [split_for("dog", 0, 3), split_for("cat here", 0, 3, cid="b")]
        vocab = build_context_vocab(splits)
        assert [e.text for e in vocab.entries] == ["here"]

    def test_first_occurrence_order(self):
        splits = [
            split_for("dog near tree", 0, 3, cid="a"),
            split_for("cat by window", 0, 3, cid="b"),
            split_for("cow near tree", 0, 3, cid="c"),
        ]
        vocab = build_context_vocab(splits)
        assert [e.text for e in vocab.entries] == ["near tree", "by window"]

    def test_offset_comes_from_first_occurrence(self):
        # Same context text extracted at different anchors: first wins.
        splits = [
            split_for("big dog red", 4, 7, cid="a"),   # context "big red", offset 3
            split_for("dog big red", 0, 3, cid="b"),   # context "big red", offset 0
        ]
        vocab = build_context_vocab(splits)
        assert vocab.entries[0] == ContextEntry("big red", 3)


class TestEligibleObjectCandidates:
    def test_fully_annotated_image_leaves_nothing(self):
        vocab = build_object_vocab(["dog", "cat"], {})
        split = split_for("the dog here", 4, 7)
        assert eligible_object_candidates(split, image_with({"dog", "cat"}), vocab) == []

    def test_annotated_categories_excluded(self):
        vocab = build_object_vocab(["person", "dog", "cat"], {})
        split = split_for("the person here", 4, 10, category="person")
        got = eligible_object_candidates(split, image_with({"person"}), vocab)
        assert [e.term for e in got] == ["dog", "cat"]

    def test_own_term_excluded_even_if_category_absent(self):
        vocab = build_object_vocab(["dog", "cat"], {})
        split = split_for("the dog here", 4, 7)
        got = eligible_object_candidates(split, image_with({"person"}), vocab)
        assert [e.term for e in got] == ["cat"]

    def test_image_mismatch_rejected(self):
        vocab = build_object_vocab(["dog"], {})
        split = split_for("the dog here", 4, 7, image="i1")
        with pytest.raises(ValidationError):
            eligible_object_candidates(split, image_with({"dog"}, image="other"), vocab)

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_exclusion_matches_exhaustive_oracle(self, data):
        cats = data.draw(
            st.lists(st.sampled_from(COCO_CATEGORIES), min_size=2, max_size=15, unique=True)
        )
        synonyms = {
            c: data.draw(st.lists(st.sampled_from(["alpha", "beta", c + "ish"]), max_size=2))
            for c in cats
        }
        vocab = build_object_vocab(cats, synonyms)
        annotated = set(data.draw(st.lists(st.sampled_from(cats), max_size=5)))
        object_category = data.draw(st.sampled_from(cats))
        split = split_for("the thing here", 4, 9, category=object_category)
        got = eligible_object_candidates(split, image_with(annotated), vocab)

        # Exhaustive oracle over all vocabulary entries.
        want = [
            e
            for e in vocab.entries
            if e.category not in annotated and e.term != split.object_text
        ]
        assert got == want
        assert all(e.category not in annotated for e in got)
        assert all(e in vocab.entries for e in got)


class TestSynonymFile:
    def test_load_synonyms(self, tmp_path):
        path = tmp_path / "syn.json"
        path.write_text('{"dog": ["puppy"], "cat": []}', encoding="utf-8")
        categories, synonyms = load_synonyms(path)
        assert categories == ["dog", "cat"]
        assert synonyms == {"dog": ["puppy"], "cat": []}

    def test_dumps_round_trip_shapes(self, tmp_path):
        vocab = build_object_vocab(["dog"], {"dog": ["puppy"]})
        dump_object_vocab(vocab, tmp_path / "o.jsonl")
        assert len((tmp_path / "o.jsonl").read_text().splitlines()) == 2

        splits = [split_for("dog near tree", 0, 3)]
        dump_context_vocab(build_context_vocab(splits), tmp_path / "c.jsonl")
        assert "near tree" in (tmp_path / "c.jsonl").read_text()
