"""Global term dictionary: per-attribute term -> dense integer id.

A single dictionary is shared by every database's content knowledge, so a
term carries the same id everywhere. Assignment is append-only and
persisted to a tab-separated log replayed at startup.
"""
from __future__ import annotations

import threading
from pathlib import Path

from .model import Attribute


class StorageFailure(RuntimeError):
    """The persistence layer is unavailable or corrupt."""


class GlobalTermDictionary:
    """Per-attribute bijection term <-> id; ids are dense from 0.

    ``get_or_assign`` takes an exclusive per-attribute lock; ``lookup``
    never mutates and is safe concurrently.
    """

    def __init__(self, log_path: Path | str | None = None):
        self._maps: dict[Attribute, dict[str, int]] = {a: {} for a in Attribute}
        self._locks = {a: threading.Lock() for a in Attribute}
        self._log_path = Path(log_path) if log_path is not None else None
        self._log_file = None
        if self._log_path is not None:
            self._replay()
            try:
                self._log_path.parent.mkdir(parents=True, exist_ok=True)
                self._log_file = open(self._log_path, "a", encoding="utf-8")
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        try:
            lines = self._log_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        for n, line in enumerate(lines, 1):
            if not line:
                continue
            try:
                attr_name, term, id_text = line.split("\t")
                self._maps[Attribute(attr_name)][term] = int(id_text)
            except (ValueError, KeyError) as exc:
                raise StorageFailure(
                    f"{self._log_path}:{n}: bad dictionary record"
                ) from exc

    def get_or_assign(self, attr: Attribute, term: str) -> int:
        with self._locks[attr]:
            table = self._maps[attr]
            existing = table.get(term)
            if existing is not None:
                return existing
            term_id = len(table)
            if self._log_file is not None:
                try:
                    self._log_file.write(f"{attr.value}\t{term}\t{term_id}\n")
                    self._log_file.flush()
                except OSError as exc:
                    raise StorageFailure(str(exc)) from exc
            table[term] = term_id
            return term_id

    def lookup(self, attr: Attribute, term: str) -> int | None:
        return self._maps[attr].get(term)

    def size(self, attr: Attribute) -> int:
        return len(self._maps[attr])

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None
