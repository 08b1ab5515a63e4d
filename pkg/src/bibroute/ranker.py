"""Database ranking from sampled content knowledge.

The relevance estimate for a database is its sampled-record count times
the product, over every query term, of that term's tuple frequency divided
by the sampled count. Equivalently (and computed this way for exactness):

    score = (product of tuple frequencies) / sampled_count ** (terms - 1)

The numerator and denominator are exact integers, so the single final
division is correctly rounded; a one-term query scores exactly its tuple
frequency. The estimate always lies in [0, sampled_count].
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .knowledge import ContentKnowledge, tuple_frequency
from .model import Attribute, ConjunctiveQuery
from .termdict import GlobalTermDictionary


class DbStatus(str, Enum):
    SCORED = "scored"
    UNSUPPORTED = "unsupported"
    FAILED = "failed"


@dataclass(frozen=True)
class RankedDatabase:
    db_id: str
    score: float
    status: DbStatus
    stale: bool = False


class NoDatabases(RuntimeError):
    """The database registry is empty."""


def score(
    q: ConjunctiveQuery, ck: ContentKnowledge, tdict: GlobalTermDictionary
) -> float:
    if ck.sampled_count == 0:
        return 0.0
    numerator = 1
    term_count = 0
    for attr, term in q.terms():
        tf = tuple_frequency(ck, attr, term, tdict)
        if tf == 0:
            return 0.0
        numerator *= tf
        term_count += 1
    return numerator / ck.sampled_count ** (term_count - 1)


@dataclass(frozen=True)
class DbSupport:
    """What the ranker needs to know about a database besides its snapshot."""

    capabilities: frozenset[Attribute] = frozenset(Attribute)
    failed: bool = False
    stale: bool = False


def rank(
    q: ConjunctiveQuery,
    snapshots: Mapping[str, ContentKnowledge],
    tdict: GlobalTermDictionary,
    support: Mapping[str, DbSupport] | None = None,
) -> list[RankedDatabase]:
    """Order databases by estimated relevance, most relevant first.

    Databases that failed their last contact or do not support one of the
    query's attributes take the lowest ranks, after every scored entry.
    Ties break by ascending database id.
    """
    if not snapshots:
        raise NoDatabases("no databases registered")
    support = support or {}
    scored: list[RankedDatabase] = []
    bottom: list[RankedDatabase] = []
    for db_id in sorted(snapshots):
        info = support.get(db_id, DbSupport())
        if info.failed:
            bottom.append(RankedDatabase(db_id, 0.0, DbStatus.FAILED, info.stale))
        elif not q.attributes() <= info.capabilities:
            bottom.append(RankedDatabase(db_id, 0.0, DbStatus.UNSUPPORTED, info.stale))
        else:
            value = score(q, snapshots[db_id], tdict)
            scored.append(RankedDatabase(db_id, value, DbStatus.SCORED, info.stale))
    scored.sort(key=lambda r: (-r.score, r.db_id))
    return scored + bottom
