"""Line-oriented search protocol shared by the gateway client and the
simulated servers.

Request::

    SEARCH <db_id> MAX=<n>
    Q <attr>=<term>,<term>...     (one line per predicate)
    END

Response::

    HITS <total>
    REC <n-fields>
    <field>: <value>              (n-fields lines)
    ENDREC
    ...                           (one block per returned record)
    DONE

or a single ``ERR <code> <message>`` line. All text is UTF-8; one request
per connection.
"""
from __future__ import annotations

from .model import Attribute, BibRecord, ConjunctiveQuery, ATTRIBUTE_ORDER


class ProtocolError(RuntimeError):
    """Malformed request or response; carries the offending line."""

    def __init__(self, message: str, line: str = ""):
        super().__init__(f"{message}: {line!r}" if line else message)
        self.line = line


def serialize_request(db_id: str, q: ConjunctiveQuery, max_records: int) -> str:
    lines = [f"SEARCH {db_id} MAX={max_records}"]
    for attr in ATTRIBUTE_ORDER:
        if attr in q.predicates:
            lines.append(f"Q {attr.value}={','.join(sorted(q.predicates[attr]))}")
    lines.append("END")
    return "".join(line + "\n" for line in lines)


def parse_request(text: str) -> tuple[str, ConjunctiveQuery, int]:
    lines = text.splitlines()
    if not lines:
        raise ProtocolError("empty request")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "SEARCH" or not head[2].startswith("MAX="):
        raise ProtocolError("bad request line", lines[0])
    db_id = head[1]
    try:
        max_records = int(head[2][4:])
    except ValueError:
        raise ProtocolError("bad MAX value", lines[0]) from None
    if max_records < 0:
        raise ProtocolError("negative MAX", lines[0])
    preds: dict[Attribute, frozenset[str]] = {}
    terminated = False
    for line in lines[1:]:
        if line == "END":
            terminated = True
            break
        if not line.startswith("Q "):
            raise ProtocolError("expected Q line", line)
        name, _, terms_text = line[2:].partition("=")
        try:
            attr = Attribute(name)
        except ValueError:
            raise ProtocolError("unknown attribute", line) from None
        terms = frozenset(t for t in terms_text.split(",") if t)
        if not terms:
            raise ProtocolError("empty predicate", line)
        preds[attr] = terms
    if not terminated:
        raise ProtocolError("request not terminated by END")
    if not preds:
        raise ProtocolError("request has no predicates")
    return db_id, ConjunctiveQuery(preds), max_records


def record_fields(record: BibRecord) -> list[tuple[str, str]]:
    fields: list[tuple[str, str]] = []
    if record.system_id:
        fields.append(("id", record.system_id))
    fields.append(("title", record.title))
    fields.extend(("author", a) for a in record.authors)
    fields.extend(("subject", s) for s in record.subjects)
    if record.isbn:
        fields.append(("isbn", record.isbn))
    if record.issn:
        fields.append(("issn", record.issn))
    return fields


def record_from_fields(fields: list[tuple[str, str]]) -> BibRecord:
    system_id = title = isbn = issn = None
    authors: list[str] = []
    subjects: list[str] = []
    for name, value in fields:
        if name == "id":
            system_id = value
        elif name == "title":
            title = value
        elif name == "author":
            authors.append(value)
        elif name == "subject":
            subjects.append(value)
        elif name == "isbn":
            isbn = value
        elif name == "issn":
            issn = value
        else:
            raise ProtocolError("unknown record field", f"{name}: {value}")
    if title is None:
        raise ProtocolError("record without title")
    return BibRecord(
        title=title,
        authors=tuple(authors),
        subjects=tuple(subjects),
        system_id=system_id,
        isbn=isbn,
        issn=issn,
    )


def serialize_response(total: int, records: list[BibRecord]) -> str:
    lines = [f"HITS {total}"]
    for record in records:
        fields = record_fields(record)
        lines.append(f"REC {len(fields)}")
        lines.extend(f"{name}: {value}" for name, value in fields)
        lines.append("ENDREC")
    lines.append("DONE")
    return "".join(line + "\n" for line in lines)


def serialize_error(code: str, message: str) -> str:
    return f"ERR {code} {message}\n"


def parse_response(text: str) -> tuple[int, list[BibRecord]]:
    """Parse a response; raises ProtocolError or returns (hits, records).

    An ``ERR`` response is surfaced as a (code, message) tuple inside a
    ServerResponseError raised by the caller; here it raises ProtocolError
    so callers that want ERR must check the first line themselves.
    """
    lines = text.splitlines()
    if not lines:
        raise ProtocolError("empty response")
    pos = 0
    head = lines[pos].split(None, 1)
    if head[0] != "HITS" or len(head) != 2:
        raise ProtocolError("bad response header", lines[pos])
    try:
        total = int(head[1])
    except ValueError:
        raise ProtocolError("bad hit count", lines[pos]) from None
    pos += 1
    records: list[BibRecord] = []
    while pos < len(lines) and lines[pos] != "DONE":
        rec_head = lines[pos].split()
        if len(rec_head) != 2 or rec_head[0] != "REC":
            raise ProtocolError("expected REC line", lines[pos])
        try:
            n_fields = int(rec_head[1])
        except ValueError:
            raise ProtocolError("bad field count", lines[pos]) from None
        pos += 1
        fields: list[tuple[str, str]] = []
        for _ in range(n_fields):
            if pos >= len(lines):
                raise ProtocolError("truncated record")
            name, sep, value = lines[pos].partition(": ")
            if not sep:
                raise ProtocolError("bad field line", lines[pos])
            fields.append((name, value))
            pos += 1
        if pos >= len(lines) or lines[pos] != "ENDREC":
            raise ProtocolError("record not terminated by ENDREC")
        pos += 1
        try:
            records.append(record_from_fields(fields))
        except ValueError as exc:
            raise ProtocolError(str(exc)) from exc
    if pos >= len(lines):
        raise ProtocolError("response not terminated by DONE")
    return total, records


def parse_error_line(line: str) -> tuple[str, str]:
    parts = line.split(None, 2)
    if len(parts) < 2 or parts[0] != "ERR":
        raise ProtocolError("bad ERR line", line)
    code = parts[1]
    message = parts[2] if len(parts) > 2 else ""
    return code, message
