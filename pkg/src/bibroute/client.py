"""Gateway client: submits a conjunctive query to one remote catalog
server and parses the response into domain records.

One connection per request; failures map to distinct exception types so
the broker can surface a precise per-database status.
"""
from __future__ import annotations

import socket
from dataclasses import dataclass
from pathlib import Path

from . import wire
from .model import Attribute, BibRecord, ConjunctiveQuery

DEFAULT_TIMEOUT = 10.0


class GatewayError(RuntimeError):
    pass


class SearchTimeout(GatewayError):
    pass


class SearchConnectionRefused(GatewayError):
    pass


class ServerResponseError(GatewayError):
    """The server answered with an ERR line."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class DatabaseHandle:
    """Addressing for one remote database: host, port, and database id."""

    db_id: str
    host: str
    port: int
    name: str = ""
    capabilities: frozenset[Attribute] = frozenset(Attribute)


def search(
    handle: DatabaseHandle,
    q: ConjunctiveQuery,
    max_records: int,
    timeout: float = DEFAULT_TIMEOUT,
) -> tuple[int, list[BibRecord]]:
    """Round-trip one search; total hits survive truncation at max_records."""
    request = wire.serialize_request(handle.db_id, q, max_records)
    try:
        with socket.create_connection((handle.host, handle.port), timeout=timeout) as sock:
            sock.sendall(request.encode("utf-8"))
            sock.shutdown(socket.SHUT_WR)
            chunks = []
            while True:
                chunk = sock.recv(65536)
                if not chunk:
                    break
                chunks.append(chunk)
    except ConnectionRefusedError as exc:
        raise SearchConnectionRefused(f"{handle.host}:{handle.port}") from exc
    except (socket.timeout, TimeoutError) as exc:
        raise SearchTimeout(f"{handle.host}:{handle.port}") from exc
    except OSError as exc:
        raise GatewayError(str(exc)) from exc
    text = b"".join(chunks).decode("utf-8")
    if text.startswith("ERR"):
        first = text.splitlines()[0]
        code, message = wire.parse_error_line(first)
        raise ServerResponseError(code, message)
    return wire.parse_response(text)


def load_registry(path: Path | str) -> list[DatabaseHandle]:
    """Registry file: db_id, host, port, capabilities, [display name] per line."""
    handles = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 4:
            raise ValueError(f"{path}:{n}: expected at least 4 tab-separated fields")
        db_id, host, port_text, caps_text = parts[:4]
        name = parts[4] if len(parts) > 4 else db_id
        caps = frozenset(Attribute(c) for c in caps_text.split(",") if c)
        handles.append(DatabaseHandle(db_id, host, int(port_text), name, caps))
    return handles


def save_registry(handles: list[DatabaseHandle], path: Path | str) -> None:
    lines = []
    for h in handles:
        caps = ",".join(sorted(a.value for a in h.capabilities))
        lines.append(f"{h.db_id}\t{h.host}\t{h.port}\t{caps}\t{h.name or h.db_id}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
