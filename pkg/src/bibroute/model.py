"""Core domain model: records, attributes, conjunctive queries, tokenization.

Everything here is immutable after construction and safe to share between
threads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping

# Separator used inside composite identity keys; cannot occur in tokens.
UNIT_SEP = "\x1f"

# Tokens are maximal runs of alphanumeric characters (underscore is a
# separator too, so "CD-ROM" and "CD_ROM" both yield ["cd", "rom"]).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_WS_RE = re.compile(r"\s+")


class Attribute(str, Enum):
    """The three queryable and sampled bibliographic attributes."""

    TITLE = "title"
    AUTHOR = "author"
    SUBJECT = "subject"


#: Deterministic iteration order for attributes everywhere.
ATTRIBUTE_ORDER = (Attribute.TITLE, Attribute.AUTHOR, Attribute.SUBJECT)


class EmptyQuery(ValueError):
    """All query fields tokenized to nothing."""


class IdentityKind(str, Enum):
    SYSTEM_ID = "sysid"
    ISBN = "isbn"
    TITLE_AUTHOR = "titleauthor"


def load_stoplist(path: Path | str) -> frozenset[str]:
    """Read a stoplist file: one lowercase term per line, '#' comments."""
    terms = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(line.lower())
    return frozenset(terms)


def default_stoplist() -> frozenset[str]:
    text = resources.files("bibroute.data").joinpath("stopwords.txt").read_text(
        encoding="utf-8"
    )
    terms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(line.lower())
    return frozenset(terms)


def tokenize(text: str, stoplist: frozenset[str] = frozenset()) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords.

    Order and duplicates are preserved; deduplication is the caller's job.
    """
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stoplist]


def _normalize(text: str) -> str:
    return _WS_RE.sub(" ", text.strip()).lower()


@dataclass(frozen=True)
class BibRecord:
    """One bibliographic entry.

    ``subjects`` elements are whole subject *values*, each possibly
    multi-word.
    """

    title: str
    authors: tuple[str, ...] = ()
    subjects: tuple[str, ...] = ()
    system_id: str | None = None
    isbn: str | None = None
    issn: str | None = None

    def __post_init__(self) -> None:
        if not _normalize(self.title):
            raise ValueError("record title is empty")
        if any(not s.strip() for s in self.subjects):
            raise ValueError("empty subject value")

    def attribute_terms(self, stoplist: frozenset[str]) -> dict[Attribute, frozenset[str]]:
        """Distinct term set per attribute (authors and subject values unioned)."""
        out: dict[Attribute, frozenset[str]] = {}
        title = frozenset(tokenize(self.title, stoplist))
        if title:
            out[Attribute.TITLE] = title
        author: set[str] = set()
        for a in self.authors:
            author.update(tokenize(a, stoplist))
        if author:
            out[Attribute.AUTHOR] = frozenset(author)
        subject: set[str] = set()
        for s in self.subjects:
            subject.update(tokenize(s, stoplist))
        if subject:
            out[Attribute.SUBJECT] = frozenset(subject)
        return out


@dataclass(frozen=True)
class RecordIdentity:
    kind: IdentityKind
    key: str


def record_identity(record: BibRecord) -> RecordIdentity:
    """Identity precedence: system id, then ISBN, then title+first author."""
    if record.system_id:
        return RecordIdentity(IdentityKind.SYSTEM_ID, record.system_id)
    if record.isbn:
        return RecordIdentity(IdentityKind.ISBN, record.isbn)
    first_author = _normalize(record.authors[0]) if record.authors else ""
    key = _normalize(record.title) + UNIT_SEP + first_author
    return RecordIdentity(IdentityKind.TITLE_AUTHOR, key)


@dataclass(frozen=True)
class ConjunctiveQuery:
    """Per-attribute term sets, all AND-combined."""

    predicates: Mapping[Attribute, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        preds = {a: frozenset(ts) for a, ts in self.predicates.items()}
        if not preds:
            raise EmptyQuery("query has no predicates")
        if any(not ts for ts in preds.values()):
            raise ValueError("empty term set in predicate")
        object.__setattr__(self, "predicates", preds)

    def attributes(self) -> frozenset[Attribute]:
        return frozenset(self.predicates)

    def terms(self) -> Iterator[tuple[Attribute, str]]:
        """All (attribute, term) pairs in a deterministic order."""
        for attr in ATTRIBUTE_ORDER:
            if attr in self.predicates:
                for term in sorted(self.predicates[attr]):
                    yield attr, term

    def term_count(self) -> int:
        return sum(len(ts) for ts in self.predicates.values())

    def __hash__(self) -> int:
        return hash(tuple(self.terms()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConjunctiveQuery):
            return NotImplemented
        return dict(self.predicates) == dict(other.predicates)


def build_query(
    title: str = "",
    author: str = "",
    subject: str = "",
    stoplist: frozenset[str] = frozenset(),
) -> ConjunctiveQuery:
    """Tokenize and deduplicate the three form fields into a query.

    Attributes whose field tokenizes to nothing are omitted; raises
    EmptyQuery when nothing survives.
    """
    preds: dict[Attribute, frozenset[str]] = {}
    for attr, text in (
        (Attribute.TITLE, title),
        (Attribute.AUTHOR, author),
        (Attribute.SUBJECT, subject),
    ):
        terms = frozenset(tokenize(text, stoplist))
        if terms:
            preds[attr] = terms
    if not preds:
        raise EmptyQuery("all query fields are empty after tokenization")
    return ConjunctiveQuery(preds)


def format_query(q: ConjunctiveQuery) -> str:
    """Render a query as tab-separated ``attr=term,term`` groups."""
    groups = []
    for attr in ATTRIBUTE_ORDER:
        if attr in q.predicates:
            groups.append(f"{attr.value}={','.join(sorted(q.predicates[attr]))}")
    return "\t".join(groups)


def parse_query_groups(groups: Iterable[str]) -> ConjunctiveQuery:
    """Inverse of :func:`format_query` given the already-split groups."""
    preds: dict[Attribute, frozenset[str]] = {}
    for group in groups:
        name, _, terms = group.partition("=")
        attr = Attribute(name)
        preds[attr] = frozenset(t for t in terms.split(",") if t)
    return ConjunctiveQuery(preds)
