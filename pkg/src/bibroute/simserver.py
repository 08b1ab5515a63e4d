"""Simulated bibliographic database servers.

Each server owns an immutable corpus loaded from a human-editable text
file and answers conjunctive searches over the line protocol in
:mod:`bibroute.wire`. Results are unranked: matching records come back in
corpus order. Two evaluation modes exist: exact per-attribute matching,
and a broadened mode where title terms also match subject values, which
mimics real servers that over-match title searches.
"""
from __future__ import annotations

import socketserver
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import wire
from .model import (
    Attribute,
    BibRecord,
    ConjunctiveQuery,
    default_stoplist,
    tokenize,
)


class Mode(str, Enum):
    EXACT = "exact"
    BROAD_TITLE = "broad-title"


class ParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateSystemId(ValueError):
    pass


class UnsupportedAttribute(ValueError):
    """The corpus does not support one of the query's attributes."""


@dataclass
class LibraryCorpus:
    db_id: str
    records: list[BibRecord] = field(default_factory=list)
    mode: Mode = Mode.EXACT
    capabilities: frozenset[Attribute] = frozenset(Attribute)
    with_ids: bool = True
    stoplist: frozenset[str] = field(default_factory=default_stoplist)
    # Per-record term sets, computed on first use; records are immutable
    # while serving, so the cache never invalidates.
    _terms_cache: dict[int, dict[Attribute, frozenset[str]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def total_count(self) -> int:
        return len(self.records)

    def terms_for(self, index: int) -> dict[Attribute, frozenset[str]]:
        cached = self._terms_cache.get(index)
        if cached is None:
            cached = self.records[index].attribute_terms(self.stoplist)
            self._terms_cache[index] = cached
        return cached


_FIELD_NAMES = {"id", "title", "author", "subject", "isbn", "issn"}


def load_corpus(
    path: Path | str,
    db_id: str | None = None,
    mode: Mode = Mode.EXACT,
    capabilities: frozenset[Attribute] = frozenset(Attribute),
    with_ids: bool = True,
    stoplist: frozenset[str] | None = None,
) -> LibraryCorpus:
    """Parse a corpus file: blank-line-separated blocks of ``field: value``."""
    path = Path(path)
    corpus = LibraryCorpus(
        db_id=db_id or path.stem,
        mode=mode,
        capabilities=capabilities,
        with_ids=with_ids,
        stoplist=stoplist if stoplist is not None else default_stoplist(),
    )
    seen_ids: set[str] = set()
    block: list[tuple[str, str]] = []
    block_start = 1

    def flush(line_no: int) -> None:
        nonlocal block
        if not block:
            return
        try:
            record = wire.record_from_fields(block)
        except (wire.ProtocolError, ValueError) as exc:
            raise ParseError(str(exc), block_start) from exc
        if record.system_id:
            if record.system_id in seen_ids:
                raise DuplicateSystemId(record.system_id)
            seen_ids.add(record.system_id)
        corpus.records.append(record)
        block = []

    for line_no, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), 1
    ):
        stripped = line.strip()
        if not stripped:
            flush(line_no)
            block_start = line_no + 1
            continue
        if stripped.startswith("#"):
            continue
        name, sep, value = stripped.partition(":")
        name = name.strip()
        if not sep or name not in _FIELD_NAMES:
            raise ParseError("expected 'field: value'", line_no)
        if not block:
            block_start = line_no
        block.append((name, value.strip()))
    flush(line_no if corpus.records or block else 0)
    return corpus


def save_corpus(corpus: LibraryCorpus, path: Path | str) -> None:
    blocks = []
    for record in corpus.records:
        blocks.append(
            "".join(f"{name}: {value}\n" for name, value in wire.record_fields(record))
        )
    Path(path).write_text("\n".join(blocks), encoding="utf-8")


def _matches(index: int, q: ConjunctiveQuery, corpus: LibraryCorpus) -> bool:
    terms_by_attr = corpus.terms_for(index)
    for attr, terms in q.predicates.items():
        have = terms_by_attr.get(attr, frozenset())
        if corpus.mode is Mode.BROAD_TITLE and attr is Attribute.TITLE:
            have = have | terms_by_attr.get(Attribute.SUBJECT, frozenset())
        if not terms <= have:
            return False
    return True


def evaluate(
    corpus: LibraryCorpus, q: ConjunctiveQuery, max_records: int
) -> tuple[int, list[BibRecord]]:
    """Total hit count plus the first ``max_records`` matches in corpus order."""
    if not q.attributes() <= corpus.capabilities:
        missing = ", ".join(
            sorted(a.value for a in q.attributes() - corpus.capabilities)
        )
        raise UnsupportedAttribute(missing)
    hits = [r for i, r in enumerate(corpus.records) if _matches(i, q, corpus)]
    returned = hits[:max_records]
    if not corpus.with_ids:
        returned = [
            BibRecord(
                title=r.title,
                authors=r.authors,
                subjects=r.subjects,
                system_id=None,
                isbn=r.isbn,
                issn=r.issn,
            )
            for r in returned
        ]
    return len(hits), returned


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        corpus: LibraryCorpus = self.server.corpus  # type: ignore[attr-defined]
        raw_lines = []
        while True:
            raw = self.rfile.readline()
            if not raw:
                break
            line = raw.decode("utf-8").rstrip("\r\n")
            raw_lines.append(line)
            if line == "END":
                break
        text = "".join(line + "\n" for line in raw_lines)
        try:
            db_id, q, max_records = wire.parse_request(text)
        except wire.ProtocolError as exc:
            self.wfile.write(wire.serialize_error("BADREQUEST", str(exc)).encode("utf-8"))
            return
        if db_id != corpus.db_id:
            self.wfile.write(
                wire.serialize_error("NODB", f"unknown database {db_id}").encode("utf-8")
            )
            return
        try:
            total, records = evaluate(corpus, q, max_records)
        except UnsupportedAttribute as exc:
            self.wfile.write(
                wire.serialize_error("UNSUPPORTED", f"attribute not searchable: {exc}").encode("utf-8")
            )
            return
        self.wfile.write(wire.serialize_response(total, records).encode("utf-8"))


class BindFailure(OSError):
    pass


class LibraryServer(socketserver.ThreadingTCPServer):
    """One request per connection; corpus immutable while serving."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, corpus: LibraryCorpus, host: str = "127.0.0.1", port: int = 0):
        try:
            super().__init__((host, port), _Handler)
        except OSError as exc:
            raise BindFailure(str(exc)) from exc
        self.corpus = corpus

    @property
    def port(self) -> int:
        return self.server_address[1]

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def serve(corpus: LibraryCorpus, host: str, port: int) -> LibraryServer:
    server = LibraryServer(corpus, host, port)
    server.start_background()
    return server
