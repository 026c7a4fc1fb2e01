"""Replacement vocabularies and per-caption candidate eligibility.

The object vocabulary is the category list expanded with synonym terms
(each term remembers which category it denotes); the context vocabulary is
every distinct context segment seen in the corpus. Candidate filtering
excludes categories annotated in the caption's image plus the caption's own
object term.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import ImageAnnotations, SplitCaption
from .errors import EmptyVocabulary, ValidationError
from .textnorm import normalize


@dataclass(frozen=True)
class VocabEntry:
    term: str
    category: str


@dataclass(frozen=True)
class ObjectVocabulary:
    entries: tuple[VocabEntry, ...]

    def __post_init__(self) -> None:
        seen = set()
        for e in self.entries:
            if not e.term or not e.category:
                raise ValidationError("vocabulary entries must be non-empty")
            if e.term in seen:
                raise ValidationError(f"duplicate vocabulary term {e.term!r}")
            seen.add(e.term)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ContextEntry:
    """A context segment plus the offset where its source object sat.

    The offset lets a foreign context be spliced around another caption's
    object at the same anchor position, so substituting a caption's own
    context reproduces the original caption exactly.
    """

    text: str
    insert_offset: int


@dataclass(frozen=True)
class ContextVocabulary:
    entries: tuple[ContextEntry, ...]

    def __post_init__(self) -> None:
        seen = set()
        for e in self.entries:
            if not e.text:
                raise ValidationError("context entries must be non-empty")
            if e.text in seen:
                raise ValidationError(f"duplicate context {e.text!r}")
            seen.add(e.text)

    def __len__(self) -> int:
        return len(self.entries)


def build_object_vocab(
    categories: Sequence[str], synonyms: Mapping[str, Sequence[str]]
) -> ObjectVocabulary:
    """Union of category names and their synonym terms, first occurrence wins."""
    if not categories:
        raise EmptyVocabulary("no categories given")
    entries: list[VocabEntry] = []
    seen: set[str] = set()
    for category in categories:
        cat = normalize(category)
        if not cat:
            raise ValidationError("blank category name")
        for term in [cat, *(normalize(t) for t in synonyms.get(category, []))]:
            if term and term not in seen:
                seen.add(term)
                entries.append(VocabEntry(term=term, category=cat))
    return ObjectVocabulary(entries=tuple(entries))


def build_context_vocab(splits: Sequence[SplitCaption]) -> ContextVocabulary:
    """Distinct non-empty context segments in first-occurrence order."""
    entries: list[ContextEntry] = []
    seen: set[str] = set()
    for split in splits:
        text = split.context_text
        if text and text not in seen:
            seen.add(text)
            entries.append(ContextEntry(text=text, insert_offset=split.context_insert_offset))
    return ContextVocabulary(entries=tuple(entries))


def eligible_object_candidates(
    split: SplitCaption, annotations: ImageAnnotations, vocab: ObjectVocabulary
) -> list[VocabEntry]:
    """Vocabulary entries usable as counterfactual objects for this caption.

    Excludes every term whose category is annotated in the image (the edited
    caption must not describe something actually present) and the caption's
    own object term.
    """
    if annotations.image_id != split.record.image_id:
        raise ValidationError(
            f"annotations are for image {annotations.image_id!r}, "
            f"caption is from {split.record.image_id!r}"
        )
    annotated = {normalize(c) for c in annotations.categories}
    return [
        e
        for e in vocab.entries
        if e.category not in annotated and e.term != split.object_text
    ]


def load_synonyms(path: str | Path) -> tuple[list[str], dict[str, list[str]]]:
    """Read a synonyms JSON file; its keys double as the category list."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected an object of category -> terms")
    categories = list(doc.keys())
    synonyms = {k: [str(t) for t in v] for k, v in doc.items()}
    return categories, synonyms


def dump_object_vocab(vocab: ObjectVocabulary, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in vocab.entries:
            fh.write(json.dumps({"term": e.term, "category": e.category}, ensure_ascii=False) + "\n")


def dump_context_vocab(vocab: ContextVocabulary, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in vocab.entries:
            fh.write(
                json.dumps({"context": e.text, "insert_offset": e.insert_offset}, ensure_ascii=False)
                + "\n"
            )
