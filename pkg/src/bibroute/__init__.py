"""bibroute: a query-routing broker for bibliographic catalog servers.

Samples remote database content with training queries, summarizes it into
per-database term statistics, and ranks databases for conjunctive
bibliographic queries. Ships with a simulated server fleet so the whole
pipeline runs at desk scale.
"""

from .model import (
    Attribute,
    BibRecord,
    ConjunctiveQuery,
    EmptyQuery,
    build_query,
    record_identity,
    tokenize,
)
from .ranker import RankedDatabase, rank, score

__all__ = [
    "Attribute",
    "BibRecord",
    "ConjunctiveQuery",
    "EmptyQuery",
    "RankedDatabase",
    "build_query",
    "rank",
    "record_identity",
    "score",
    "tokenize",
]
