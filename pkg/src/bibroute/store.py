"""Shared on-disk state for the broker, sampler workers, and maintenance.

Layout under the data directory::

    dict.log            term dictionary append log
    ck/<db>.tsv         content-knowledge snapshot per database
    rid/<db>.<kind>.txt record-id store, one sorted key file per kind
    library.tsv         training query library
    userlog.tsv         user query log
    reports/<db>.tsv    sampling progress per database
    journal.tsv         maintenance run journal
    state/              small bookkeeping files (last daily run, flags)

Ranking reads versioned snapshots taken under the store lock; each
database has a single writer (its sampler worker or the maintenance
coordinator), which publishes a rebuilt snapshot atomically.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .client import DatabaseHandle, load_registry
from .knowledge import (
    ContentKnowledge,
    RecordIdStore,
    load_content_knowledge,
    load_record_ids,
    save_content_knowledge,
    save_record_ids,
)
from .model import default_stoplist, load_stoplist
from .queryfilter import TrainingQueryLibrary, UserQueryLog, load_library
from .ranker import DbSupport
from .termdict import GlobalTermDictionary


@dataclass
class DbRuntimeFlags:
    failed: bool = False
    stale: bool = False


class DataStore:
    def __init__(
        self,
        data_dir: Path | str,
        registry_path: Path | str | None = None,
        stoplist_path: Path | str | None = None,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        (self.data_dir / "state").mkdir(exist_ok=True)
        self.stoplist = (
            load_stoplist(stoplist_path) if stoplist_path else default_stoplist()
        )
        self.tdict = GlobalTermDictionary(self.data_dir / "dict.log")
        self.handles: dict[str, DatabaseHandle] = {}
        if registry_path is not None:
            for handle in load_registry(registry_path):
                self.handles[handle.db_id] = handle
        self.library: TrainingQueryLibrary = load_library(self.data_dir / "library.tsv")
        self.log = UserQueryLog(self.data_dir / "userlog.tsv")
        self.flags: dict[str, DbRuntimeFlags] = {
            db_id: DbRuntimeFlags() for db_id in self.handles
        }
        self._lock = threading.Lock()
        self._ck: dict[str, ContentKnowledge] = {}
        self._rid: dict[str, RecordIdStore] = {}
        for db_id in self.handles:
            self._ck[db_id] = load_content_knowledge(db_id, self.data_dir)
            self._rid[db_id] = load_record_ids(db_id, self.data_dir)

    def add_database(self, handle: DatabaseHandle) -> None:
        with self._lock:
            self.handles[handle.db_id] = handle
            self.flags.setdefault(handle.db_id, DbRuntimeFlags())
            self._ck.setdefault(
                handle.db_id, load_content_knowledge(handle.db_id, self.data_dir)
            )
            self._rid.setdefault(
                handle.db_id, load_record_ids(handle.db_id, self.data_dir)
            )

    def knowledge(self, db_id: str) -> ContentKnowledge:
        return self._ck[db_id]

    def record_ids(self, db_id: str) -> RecordIdStore:
        return self._rid[db_id]

    def snapshots(self) -> dict[str, ContentKnowledge]:
        """Consistent copies for ranking; never observes a half-published rebuild."""
        with self._lock:
            return {db_id: ck.copy() for db_id, ck in self._ck.items()}

    def support(self) -> dict[str, DbSupport]:
        out = {}
        for db_id, handle in self.handles.items():
            flags = self.flags.get(db_id, DbRuntimeFlags())
            out[db_id] = DbSupport(
                capabilities=handle.capabilities,
                failed=flags.failed,
                stale=flags.stale,
            )
        return out

    def publish(self, db_id: str, ck: ContentKnowledge, rid: RecordIdStore) -> None:
        """Swap in a rebuilt snapshot and persist it."""
        with self._lock:
            self._ck[db_id] = ck
            self._rid[db_id] = rid
        self.persist(db_id)

    def persist(self, db_id: str) -> None:
        save_content_knowledge(self._ck[db_id], self.data_dir)
        save_record_ids(self._rid[db_id], self.data_dir)

    # -- bookkeeping -------------------------------------------------------

    def last_daily_run(self) -> datetime | None:
        path = self.data_dir / "state" / "last_daily.txt"
        if not path.exists():
            return None
        return datetime.fromisoformat(path.read_text(encoding="utf-8").strip())

    def set_last_daily_run(self, when: datetime) -> None:
        path = self.data_dir / "state" / "last_daily.txt"
        path.write_text(when.isoformat() + "\n", encoding="utf-8")

    def journal_append(self, kind: str, details: str, when: datetime | None = None) -> None:
        when = when or datetime.now(timezone.utc)
        with open(self.data_dir / "journal.tsv", "a", encoding="utf-8") as fh:
            fh.write(f"{when.isoformat()}\t{kind}\t{details}\n")

    def journal_lines(self) -> list[str]:
        path = self.data_dir / "journal.tsv"
        if not path.exists():
            return []
        return [line for line in path.read_text(encoding="utf-8").splitlines() if line]

    def close(self) -> None:
        self.tdict.close()
