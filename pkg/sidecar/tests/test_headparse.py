import json

from cfground_sidecar.headparse import (
    MULTI_HEAD,
    NO_HEAD,
    OK,
    extract_head,
    get_parser,
    parse_captions,
    parse_file,
)


def agreement(fixture, parse):
    hits = 0
    for case in fixture:
        span = parse(case["text"])
        if case["status"] != OK:
            hits += span.status == case["status"]
            continue
        want = case["head"]
        start = case["text"].find(want)
        hits += (
            span.status == OK
            and span.start == start
            and span.end == start + len(want)
        )
    return hits / len(fixture)


class TestHeadRule:
    def test_multi_word_compound_head(self):
        span = extract_head("teddy bear on the couch")
        assert span.status == OK
        assert (span.start, span.end) == (0, 10)
        assert span.head_text == "teddy bear"

    def test_verbal_caption_has_no_head(self):
        assert extract_head("running and jumping").status == NO_HEAD

    def test_coordination_is_multi_head(self):
        assert extract_head("the man and the dog").status == MULTI_HEAD

    def test_coordination_after_preposition_is_fine(self):
        span = extract_head("man in hat and glasses")
        assert span.status == OK and span.head_text == "man"

    def test_adjective_compound_from_lexicon(self):
        span = extract_head("hot dog on a plate")
        assert span.head_text == "hot dog"

    def test_participle_premodifier_kept(self):
        span = extract_head("smiling woman holding a phone")
        assert span.status == OK and span.head_text == "woman"

    def test_span_indexes_original_text(self):
        text = "The  LARGE Teddy Bear on the couch"
        span = extract_head(text)
        assert span.status == OK
        assert text[span.start : span.end] == span.head_text
        assert span.head_text == "Teddy Bear"

    def test_empty_text(self):
        assert extract_head("").status == NO_HEAD

    def test_deterministic(self):
        texts = ["man in blue shirt", "the cat and the bird", "spinning around"]
        assert parse_captions(texts, engine="builtin") == parse_captions(
            texts, engine="builtin"
        )


class TestFixtureFidelity:
    def test_agreement_at_least_90_percent(self, head_fixture):
        assert len(head_fixture) >= 100
        _, parse = get_parser("builtin")
        score = agreement(head_fixture, parse)
        assert score >= 0.90, f"span agreement {score:.0%}"

    def test_fixture_covers_all_statuses(self, head_fixture):
        statuses = {case["status"] for case in head_fixture}
        assert statuses == {OK, NO_HEAD, MULTI_HEAD}


class TestParseFile:
    def test_writes_schema_and_counts(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        rows = [
            {"caption_id": "a", "image_id": "i", "text": "man in blue shirt",
             "bbox": [0, 0, 5, 5], "category": "person"},
            {"caption_id": "b", "image_id": "i", "text": "running and jumping",
             "bbox": [0, 0, 5, 5], "category": "person"},
            {"caption_id": "c", "image_id": "i", "text": "a cup and a plate",
             "bbox": [0, 0, 5, 5], "category": "cup"},
        ]
        corpus.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
        out = tmp_path / "parses.jsonl"
        counts = parse_file(corpus, out, engine="builtin")
        assert counts[OK] == 1 and counts[NO_HEAD] == 1 and counts[MULTI_HEAD] == 1
        docs = [json.loads(l) for l in out.read_text().splitlines()]
        assert docs[0]["status"] == "ok"
        assert docs[0]["head"] == rows[0]["text"][docs[0]["object_start"]:docs[0]["object_end"]]
        assert set(docs[1]) == {"caption_id", "status"}
