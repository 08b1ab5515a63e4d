"""Shared test utilities: random corpora and independent oracles.

The oracles here deliberately avoid the package's tokenizer, matcher, and
scorer code paths: tokenization is a character walk, matching is a direct
per-term containment check, and scoring recomputes tuple frequencies by
scanning the corpus and multiplies exact fractions.
"""
from __future__ import annotations

import random
from fractions import Fraction

from bibroute.model import Attribute, BibRecord, ConjunctiveQuery

WORDS = [
    "digital", "library", "systems", "information", "retrieval", "database",
    "management", "design", "theory", "computation", "networks", "search",
    "archives", "catalog", "index", "query", "routing", "broker", "records",
    "metadata", "storage", "text", "mining", "language", "models", "data",
    "analysis", "science", "history", "music", "art", "biology", "chemistry",
    "physics", "economics", "law", "medicine", "engineering", "学習", "圖書",
]

SURNAMES = [
    "Smith", "Jones", "Chen", "Garcia", "Novak", "Okafor", "Dubois",
    "Svensson", "Tanaka", "Rossi", "Kim", "Ivanova", "Haddad", "Park",
]


def random_record(rng: random.Random, seq: int, id_policy: str = "sysid") -> BibRecord:
    """id_policy: 'sysid', 'isbn', or 'titleauthor'."""
    title = " ".join(rng.sample(WORDS, rng.randint(2, 5)))
    authors = tuple(
        f"{rng.choice(SURNAMES)}, {chr(ord('A') + rng.randrange(26))}."
        for _ in range(rng.randint(1, 2))
    )
    subjects = tuple(
        " ".join(rng.sample(WORDS, rng.randint(1, 3)))
        for _ in range(rng.randint(0, 3))
    )
    kwargs = {}
    if id_policy == "sysid":
        kwargs["system_id"] = f"R-{seq:05d}"
    elif id_policy == "isbn":
        kwargs["isbn"] = f"97800{seq:08d}"
    else:
        # Make titles unique so title+author identity never collides by
        # accident between distinct records.
        title = f"{title} {seq}"
    return BibRecord(title=title, authors=authors, subjects=subjects, **kwargs)


def random_corpus(
    rng: random.Random, n: int, id_policy: str = "sysid"
) -> list[BibRecord]:
    return [random_record(rng, i, id_policy) for i in range(n)]


def random_query(
    rng: random.Random,
    corpus: list[BibRecord],
    stoplist: frozenset[str],
    max_terms: int = 3,
    attrs: tuple[Attribute, ...] = tuple(Attribute),
) -> ConjunctiveQuery:
    """Query whose terms are drawn from corpus text (so hits are likely)."""
    while True:
        record = rng.choice(corpus)
        preds = {}
        for attr in rng.sample(list(attrs), rng.randint(1, len(attrs))):
            if attr is Attribute.TITLE:
                text = record.title
            elif attr is Attribute.AUTHOR:
                text = " ".join(record.authors)
            else:
                text = " ".join(record.subjects)
            pool = sorted(set(oracle_tokens(text)) - stoplist)
            if not pool:
                continue
            preds[attr] = frozenset(rng.sample(pool, min(rng.randint(1, max_terms), len(pool))))
        if preds:
            return ConjunctiveQuery(preds)


# -- independent oracles ----------------------------------------------------

def oracle_tokens(text: str) -> list[str]:
    """Character-walk tokenizer: runs of alphanumerics, lowercased."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if ch.isalnum() and ch != "_":
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


def oracle_record_terms(record: BibRecord, attr: Attribute, stoplist: frozenset[str]) -> set[str]:
    if attr is Attribute.TITLE:
        texts = [record.title]
    elif attr is Attribute.AUTHOR:
        texts = list(record.authors)
    else:
        texts = list(record.subjects)
    out: set[str] = set()
    for text in texts:
        out.update(t for t in oracle_tokens(text) if t not in stoplist)
    return out


def oracle_match(record: BibRecord, q: ConjunctiveQuery, stoplist: frozenset[str]) -> bool:
    for attr, terms in q.predicates.items():
        have = oracle_record_terms(record, attr, stoplist)
        for term in terms:
            if term not in have:
                return False
    return True


def oracle_result_set(
    corpus: list[BibRecord], q: ConjunctiveQuery, stoplist: frozenset[str]
) -> list[int]:
    return [i for i, r in enumerate(corpus) if oracle_match(r, q, stoplist)]


def oracle_score(
    sampled: list[BibRecord], q: ConjunctiveQuery, stoplist: frozenset[str]
) -> float:
    """Estimate from first principles: scan for each term's tuple frequency,
    multiply tf/n as exact fractions, scale by n, convert to float once."""
    n = len(sampled)
    if n == 0:
        return 0.0
    product = Fraction(1)
    for attr, terms in q.predicates.items():
        for term in terms:
            tf = sum(
                1 for r in sampled if term in oracle_record_terms(r, attr, stoplist)
            )
            product *= Fraction(tf, n)
    return float(n * product)
