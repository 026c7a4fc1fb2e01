"""Semantic-head extraction for referring expressions.

Finds the noun (possibly a multi-word compound) denoting the referred
entity: the head of the leading noun phrase, extended left over compound
dependents. Captions without a nominal head are flagged ``no_head``;
coordinated candidate heads ("the man and the dog") are ``multi_head``.

Uses spaCy's dependency parse when the library and an English model are
available; otherwise a built-in tagger implements the same head rule over
the bundled lexicon. Both engines are deterministic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import lexicon

OK = "ok"
NO_HEAD = "no_head"
MULTI_HEAD = "multi_head"

_TOKEN_RE = re.compile(r"[A-Za-z0-9']+")


@dataclass(frozen=True)
class HeadSpan:
    status: str
    start: int | None = None
    end: int | None = None
    head_text: str | None = None


@dataclass(frozen=True)
class _Token:
    word: str
    lower: str
    start: int
    end: int


def _tokenize(text: str) -> list[_Token]:
    return [
        _Token(m.group(), m.group().lower(), m.start(), m.end())
        for m in _TOKEN_RE.finditer(text)
    ]


def _is_noun(word: str) -> bool:
    if word in lexicon.NOUNS:
        return True
    if word.endswith("ies") and word[:-3] + "y" in lexicon.NOUNS:
        return True
    for suffix in ("es", "s"):
        if word.endswith(suffix) and word[: -len(suffix)] in lexicon.NOUNS:
            return True
    return False


def _nominal_next(tokens: Sequence[_Token], i: int) -> bool:
    if i + 1 >= len(tokens):
        return False
    nxt = tokens[i + 1].lower
    return (
        _is_noun(nxt)
        or nxt in lexicon.ADJ_OR_NOUN
        or nxt in lexicon.ADJECTIVES
    )


def _tag(tokens: Sequence[_Token]) -> list[str]:
    tags = []
    noun_seen = False
    for i, tok in enumerate(tokens):
        w = tok.lower
        if w == "that":
            tag = "REL" if noun_seen else "DET"
        elif w == "one":
            tag = "NUM" if _nominal_next(tokens, i) else "PRON"
        elif w in lexicon.DETERMINERS:
            tag = "DET"
        elif w in lexicon.ADJ_OR_NOUN:
            tag = "ADJ" if _nominal_next(tokens, i) else "NOUN"
        elif w in lexicon.PREPOSITIONS:
            tag = "ADP"
        elif w in lexicon.CONJUNCTIONS:
            tag = "CCONJ"
        elif w in lexicon.RELATIVES:
            tag = "REL"
        elif w in lexicon.PRONOUNS:
            tag = "PRON"
        elif w in lexicon.ADVERBS:
            tag = "ADV"
        elif w in lexicon.NUMBERS or w.isdigit():
            tag = "NUM"
        elif w in lexicon.VERBS:
            tag = "VERB"
        elif w in lexicon.ADJECTIVES:
            tag = "ADJ"
        elif _is_noun(w):
            tag = "NOUN"
        elif w.endswith("ing") or w.endswith("ed"):
            tag = "VERB"
        elif w.endswith("ly"):
            tag = "ADV"
        else:
            tag = "NOUN"  # open-class default
        if tag == "NOUN":
            noun_seen = True
        tags.append(tag)
    return tags


def _is_boundary(tag: str, word: str, noun_seen: bool) -> bool:
    if tag in ("ADP", "REL", "PRON"):
        return True
    if tag == "VERB":
        # Participles before the first noun act as premodifiers
        # ("parked car", "smiling woman"); finite verbs always bound.
        if not noun_seen and (word.endswith("ing") or word.endswith("ed")):
            return False
        return True
    return False


def _extend_compound(tokens: Sequence[_Token], text: str, run_start: int, run_end: int) -> int:
    """Pull known multi-word nominals ("hot dog") into the head span."""
    for i in range(run_start - 1, -1, -1):
        window = " ".join(t.lower for t in tokens[i : run_end + 1])
        if window in _COMPOUND_SET:
            return i
    return run_start


_COMPOUND_SET = frozenset(lexicon.COMPOUNDS)


def extract_head(text: str) -> HeadSpan:
    """Head span of one caption under the built-in rule engine."""
    tokens = _tokenize(text)
    if not tokens:
        return HeadSpan(NO_HEAD)
    tags = _tag(tokens)

    # Leading noun phrase: first NOUN reachable without crossing a boundary.
    first_noun = None
    for i, (tok, tag) in enumerate(zip(tokens, tags)):
        if tag == "NOUN":
            first_noun = i
            break
        if _is_boundary(tag, tok.lower, noun_seen=False):
            return HeadSpan(NO_HEAD)
    if first_noun is None:
        return HeadSpan(NO_HEAD)

    run_end = first_noun
    while run_end + 1 < len(tokens) and tags[run_end + 1] == "NOUN":
        run_end += 1

    # Coordinated second head before any boundary => ambiguous referent.
    j = run_end + 1
    while j < len(tokens) and tags[j] == "ADV":
        j += 1
    if j < len(tokens) and tags[j] == "CCONJ":
        k = j + 1
        while k < len(tokens):
            tag, tok = tags[k], tokens[k]
            if tag == "NOUN":
                return HeadSpan(MULTI_HEAD)
            if tag in ("DET", "ADJ", "NUM", "ADV"):
                k += 1
                continue
            break

    run_start = _extend_compound(tokens, text, first_noun, run_end)
    start = tokens[run_start].start
    end = tokens[run_end].end
    return HeadSpan(OK, start=start, end=end, head_text=text[start:end])


def _spacy_parser() -> Callable[[str], HeadSpan] | None:
    try:
        import spacy
    except ImportError:
        return None
    try:
        nlp = spacy.load("en_core_web_sm", disable=["ner", "lemmatizer"])
    except OSError:
        return None

    def parse(text: str) -> HeadSpan:
        doc = nlp(text)
        head = None
        root = next(iter(doc.sents)).root if list(doc.sents) else None
        if root is not None and root.pos_ in ("NOUN", "PROPN"):
            head = root
        else:
            for chunk in doc.noun_chunks:
                head = chunk.root
                break
        if head is None or head.pos_ == "PRON":
            return HeadSpan(NO_HEAD)
        conjuncts = [t for t in head.conjuncts if t.pos_ in ("NOUN", "PROPN")]
        if conjuncts:
            return HeadSpan(MULTI_HEAD)
        start_tok = head
        for left in sorted(head.lefts, key=lambda t: t.i):
            if left.dep_ == "compound":
                start_tok = left
                break
        start, end = start_tok.idx, head.idx + len(head.text)
        return HeadSpan(OK, start=start, end=end, head_text=text[start:end])

    return parse


def get_parser(engine: str = "auto") -> tuple[str, Callable[[str], HeadSpan]]:
    """Return (engine_name, parse_fn); ``auto`` prefers spaCy when usable."""
    if engine in ("auto", "spacy"):
        spacy_parse = _spacy_parser()
        if spacy_parse is not None:
            return "spacy", spacy_parse
        if engine == "spacy":
            raise RuntimeError("spaCy or its English model is not available")
    return "builtin", extract_head


def parse_captions(
    texts: Iterable[str], engine: str = "auto"
) -> list[HeadSpan]:
    _, parse = get_parser(engine)
    return [parse(t) for t in texts]


def parse_file(
    captions_path: str | Path, out_path: str | Path, engine: str = "auto"
) -> dict[str, object]:
    """Read corpus JSONL, write a parses JSONL; returns status counts."""
    name, parse = get_parser(engine)
    counts: dict[str, object] = {"engine": name, OK: 0, NO_HEAD: 0, MULTI_HEAD: 0}
    with open(captions_path, "r", encoding="utf-8") as src, open(
        out_path, "w", encoding="utf-8"
    ) as dst:
        for line in src:
            if not line.strip():
                continue
            doc = json.loads(line)
            if "caption_id" not in doc:
                continue  # header line, e.g. box_format
            span = parse(doc["text"])
            counts[span.status] += 1
            out: dict = {"caption_id": doc["caption_id"], "status": span.status}
            if span.status == OK:
                out.update(
                    object_start=span.start, object_end=span.end, head=span.head_text
                )
            dst.write(json.dumps(out, ensure_ascii=False) + "\n")
    return counts
