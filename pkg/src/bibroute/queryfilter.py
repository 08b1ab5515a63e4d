"""Training-query promotion via predicate subsumption.

A query q1 is predicate-subsumed by q2 when every predicate of q2 has a
matching predicate (same attribute) in q1 whose term set contains q2's.
Under exact conjunctive evaluation this guarantees q1's results are a
subset of q2's, so a logged user query only becomes a new training query
when no existing training query already subsumes it.

Subset tests are inclusive: a query subsumes itself, which is what lets
duplicates be filtered.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .model import ConjunctiveQuery, format_query, parse_query_groups
from .termdict import StorageFailure


def predicates_match(
    p1: tuple[object, frozenset[str]], p2: tuple[object, frozenset[str]]
) -> bool:
    """Two predicates match when they are on the same attribute."""
    return p1[0] == p2[0]


def predicate_subsumed(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    """True when q1's result set is guaranteed contained in q2's."""
    for attr, terms2 in q2.predicates.items():
        terms1 = q1.predicates.get(attr)
        if terms1 is None or not terms2 <= terms1:
            return False
    return True


@dataclass(frozen=True)
class TrainingQuery:
    query: ConjunctiveQuery
    provenance: str  # "synthetic" or "user"
    created: datetime


@dataclass
class TrainingQueryLibrary:
    """Ordered training queries; no member subsumed by another at insert."""

    path: Path | None = None
    entries: list[TrainingQuery] = field(default_factory=list)

    def queries(self) -> list[ConjunctiveQuery]:
        return [e.query for e in self.entries]

    def subsumes_any(self, q: ConjunctiveQuery) -> bool:
        return any(predicate_subsumed(q, e.query) for e in self.entries)

    def add(self, q: ConjunctiveQuery, provenance: str, created: datetime | None = None) -> None:
        entry = TrainingQuery(q, provenance, created or datetime.now(timezone.utc))
        self.entries.append(entry)
        if self.path is not None:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(_format_library_line(entry) + "\n")
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc


def _format_library_line(entry: TrainingQuery) -> str:
    return f"{entry.created.isoformat()}\t{entry.provenance}\t{format_query(entry.query)}"


def load_library(path: Path | str) -> TrainingQueryLibrary:
    path = Path(path)
    lib = TrainingQueryLibrary(path=path)
    if not path.exists():
        return lib
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    for line in lines:
        if not line:
            continue
        ts_text, provenance, *groups = line.split("\t")
        lib.entries.append(
            TrainingQuery(parse_query_groups(groups), provenance, datetime.fromisoformat(ts_text))
        )
    return lib


def save_library(lib: TrainingQueryLibrary, path: Path | str) -> None:
    try:
        Path(path).write_text(
            "".join(_format_library_line(e) + "\n" for e in lib.entries),
            encoding="utf-8",
        )
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc


@dataclass(frozen=True)
class LoggedQuery:
    query: ConjunctiveQuery
    timestamp: datetime
    session: str


class UserQueryLog:
    """Append-only log of user queries; rejected queries stay for audit."""

    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path is not None else None
        self.entries: list[LoggedQuery] = []
        if self.path is not None and self.path.exists():
            try:
                lines = self.path.read_text(encoding="utf-8").splitlines()
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
            for line in lines:
                if not line:
                    continue
                ts_text, session, *groups = line.split("\t")
                self.entries.append(
                    LoggedQuery(parse_query_groups(groups), datetime.fromisoformat(ts_text), session)
                )

    def append(
        self,
        q: ConjunctiveQuery,
        session: str = "-",
        timestamp: datetime | None = None,
    ) -> None:
        entry = LoggedQuery(q, timestamp or datetime.now(timezone.utc), session)
        self.entries.append(entry)
        if self.path is not None:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(
                        f"{entry.timestamp.isoformat()}\t{entry.session}\t{format_query(q)}\n"
                    )
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc


def filter_user_queries(
    log: UserQueryLog,
    lib: TrainingQueryLibrary,
    since: datetime | None = None,
) -> list[ConjunctiveQuery]:
    """Promote unsubsumed logged queries (newer than ``since``) in order.

    Queries accepted earlier in the same scan also block later ones, so a
    duplicate within one batch is promoted only once. Accepted queries are
    appended to the library tagged as user-derived.
    """
    accepted: list[ConjunctiveQuery] = []
    for entry in log.entries:
        if since is not None and entry.timestamp <= since:
            continue
        if lib.subsumes_any(entry.query):
            continue
        lib.add(entry.query, "user", entry.timestamp)
        accepted.append(entry.query)
    return accepted
