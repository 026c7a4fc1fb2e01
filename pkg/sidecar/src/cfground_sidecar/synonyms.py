"""Synonym expansion for the object vocabulary.

Lemma names of each category's noun synsets, deduplicated, multi-word
lemmas space-joined. Backed by the WordNet lexical database when NLTK and
its corpus are installed, otherwise by a bundled lexicon covering the
MS-COCO categories. Categories that resolve to nothing map to empty lists
with a warning.
"""

from __future__ import annotations

import json
import logging
from importlib import resources
from pathlib import Path
from typing import Iterable

log = logging.getLogger(__name__)


def _normalize(term: str) -> str:
    return " ".join(term.lower().replace("_", " ").replace("-", " ").split())


def _builtin_lexicon() -> dict[str, list[str]]:
    data = resources.files("cfground_sidecar").joinpath("data/coco_synonyms.json")
    return json.loads(data.read_text(encoding="utf-8"))


def _wordnet_lookup() -> "object | None":
    try:
        from nltk.corpus import wordnet

        wordnet.synsets("dog")  # force-load; raises if the corpus is absent
        return wordnet
    except Exception:
        return None


def expand_synonyms(
    categories: Iterable[str], engine: str = "auto"
) -> dict[str, list[str]]:
    """Map each category to its synonym terms (the category itself excluded)."""
    wordnet = None
    if engine in ("auto", "wordnet"):
        wordnet = _wordnet_lookup()
        if wordnet is None and engine == "wordnet":
            raise RuntimeError("WordNet is not available (nltk corpus missing)")
    lexicon = None if wordnet is not None else _builtin_lexicon()

    out: dict[str, list[str]] = {}
    for category in categories:
        key = _normalize(category)
        if wordnet is not None:
            lemmas = [
                lemma
                for synset in wordnet.synsets(key.replace(" ", "_"), pos="n")
                for lemma in synset.lemma_names()
            ]
        else:
            lemmas = lexicon.get(key, [])
        seen: set[str] = {key}
        terms: list[str] = []
        for lemma in lemmas:
            term = _normalize(lemma)
            if term and term not in seen:
                seen.add(term)
                terms.append(term)
        if not terms and (wordnet is None and key not in (lexicon or {})):
            log.warning("no lexical entry for category %r", category)
        out[category] = terms
    return out


def write_synonyms(
    categories: Iterable[str], out_path: str | Path, engine: str = "auto"
) -> dict[str, list[str]]:
    synonyms = expand_synonyms(categories, engine=engine)
    Path(out_path).write_text(
        json.dumps(synonyms, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return synonyms


def coco_categories() -> list[str]:
    """The category list of the bundled lexicon, in its canonical order."""
    return list(_builtin_lexicon().keys())
