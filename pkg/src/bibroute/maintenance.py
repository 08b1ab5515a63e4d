"""Daily and monthly content-knowledge maintenance.

The daily update promotes freshly logged user queries into the training
library and submits only those new queries to every database, growing the
existing snapshots. The monthly update rebuilds each database's snapshot
from scratch with the full library (synthetic plus user-derived); the old
snapshot keeps serving until the rebuild completes, and a database that
cannot be reached keeps its old snapshot marked stale.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

from .client import search
from .knowledge import ContentKnowledge, RecordIdStore, filter_new, summarize
from .queryfilter import filter_user_queries
from .sampler import DatabaseUnreachable, sample_database, save_report
from .store import DataStore


@dataclass
class DbResult:
    db_id: str
    new_records: int = 0
    sampled_count: int = 0
    error: str = ""


@dataclass
class RunSummary:
    kind: str
    started: datetime
    promoted_queries: int = 0
    per_db: list[DbResult] = field(default_factory=list)

    def as_journal_details(self) -> str:
        parts = [f"queries={self.promoted_queries}"]
        for r in self.per_db:
            status = r.error or "ok"
            parts.append(f"{r.db_id}:new={r.new_records},n={r.sampled_count},{status}")
        return " ".join(parts)


def daily_update(
    store: DataStore,
    batch_limit: int = 100,
    search_fn: Callable = search,
    now: datetime | None = None,
) -> RunSummary:
    now = now or datetime.now(timezone.utc)
    summary = RunSummary(kind="daily", started=now)
    since = store.last_daily_run()
    accepted = filter_user_queries(store.log, store.library, since)
    summary.promoted_queries = len(accepted)
    if accepted:
        for db_id in sorted(store.handles):
            handle = store.handles[db_id]
            result = DbResult(db_id=db_id)
            ck = store.knowledge(db_id)
            rid = store.record_ids(db_id)
            before = ck.sampled_count
            for q in accepted:
                try:
                    _, records = search_fn(handle, q, batch_limit)
                except Exception as exc:  # per-db partial failure, run continues
                    result.error = str(exc)
                    store.flags[db_id].failed = True
                    break
                fresh = filter_new(rid, records)
                summarize(ck, store.tdict, fresh, store.stoplist)
            else:
                store.flags[db_id].failed = False
            result.new_records = ck.sampled_count - before
            result.sampled_count = ck.sampled_count
            store.persist(db_id)
            summary.per_db.append(result)
    store.set_last_daily_run(now)
    store.journal_append("daily", summary.as_journal_details(), now)
    return summary


def monthly_update(
    store: DataStore,
    batch_limit: int = 100,
    search_fn: Callable = search,
    now: datetime | None = None,
) -> RunSummary:
    now = now or datetime.now(timezone.utc)
    summary = RunSummary(kind="monthly", started=now)
    for db_id in sorted(store.handles):
        handle = store.handles[db_id]
        result = DbResult(db_id=db_id)
        old = store.knowledge(db_id)
        fresh_ck = ContentKnowledge(db_id, version=old.version + 1)
        fresh_rid = RecordIdStore(db_id)
        try:
            report = sample_database(
                handle,
                store.library,
                fresh_ck,
                fresh_rid,
                store.tdict,
                store.stoplist,
                batch_limit=batch_limit,
                search_fn=search_fn,
            )
        except DatabaseUnreachable as exc:
            # Old snapshot stays in service, flagged stale.
            result.error = str(exc)
            result.sampled_count = old.sampled_count
            store.flags[db_id].stale = True
            store.flags[db_id].failed = True
            summary.per_db.append(result)
            continue
        store.publish(db_id, fresh_ck, fresh_rid)
        save_report(report, store.data_dir)
        store.flags[db_id].stale = False
        store.flags[db_id].failed = False
        result.new_records = report.total_new
        result.sampled_count = fresh_ck.sampled_count
        summary.per_db.append(result)
    store.journal_append("monthly", summary.as_journal_details(), now)
    return summary
