"""HTTP service layer: query ranking, fan-out submission, record detail,
and admin hooks for sampling and maintenance.

All responses are JSON with the field names documented in docs/api.md;
the web UI consumes exactly these endpoints.
"""
from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import client as gateway
from .config import BrokerConfig
from .knowledge import filter_new, summarize
from .maintenance import daily_update, monthly_update
from .model import BibRecord, ConjunctiveQuery, EmptyQuery, build_query
from .ranker import rank
from .sampler import DatabaseUnreachable, load_report, sample_database, save_report
from .store import DataStore

RECORD_CACHE_LIMIT = 10000


class QueryFields(BaseModel):
    title: str = ""
    author: str = ""
    subject: str = ""


class Selection(BaseModel):
    db_id: str
    max_records: int = Field(default=10, ge=1)


class SubmitRequest(QueryFields):
    selections: list[Selection]


@dataclass
class _CacheEntry:
    record: BibRecord
    db_id: str
    expires: float


class RecordCache:
    """Bounded TTL cache of records returned by recent submissions."""

    def __init__(self, ttl: float, limit: int = RECORD_CACHE_LIMIT):
        self.ttl = ttl
        self.limit = limit
        self._entries: dict[str, _CacheEntry] = {}
        self._lock = threading.Lock()

    def put(self, record: BibRecord, db_id: str) -> str:
        locator = uuid.uuid4().hex
        with self._lock:
            if len(self._entries) >= self.limit:
                oldest = sorted(self._entries, key=lambda k: self._entries[k].expires)
                for key in oldest[: self.limit // 10 + 1]:
                    del self._entries[key]
            self._entries[locator] = _CacheEntry(record, db_id, time.time() + self.ttl)
        return locator

    def get(self, locator: str) -> _CacheEntry | None:
        with self._lock:
            entry = self._entries.get(locator)
            if entry is None:
                return None
            if entry.expires < time.time():
                del self._entries[locator]
                return None
            return entry


def record_json(record: BibRecord, locator: str | None = None) -> dict:
    out = {
        "system_id": record.system_id,
        "title": record.title,
        "authors": list(record.authors),
        "subjects": list(record.subjects),
        "isbn": record.isbn,
        "issn": record.issn,
    }
    if locator is not None:
        out["locator"] = locator
    return out


def query_json(q: ConjunctiveQuery) -> dict:
    return {attr.value: sorted(terms) for attr, terms in q.predicates.items()}


def create_app(config: BrokerConfig, store: DataStore | None = None) -> FastAPI:
    app = FastAPI(title="bibroute broker")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = store or DataStore(
        config.data_dir, config.registry_path, config.stoplist_path
    )
    cache = RecordCache(config.cache_ttl)
    app.state.store = store
    app.state.cache = cache
    app.state.config = config

    def build_or_400(fields: QueryFields) -> ConjunctiveQuery:
        try:
            return build_query(
                fields.title, fields.author, fields.subject, store.stoplist
            )
        except EmptyQuery:
            raise HTTPException(400, "query is empty after tokenization")

    @app.get("/api/databases")
    def databases() -> dict:
        snaps = store.snapshots()
        out = []
        for db_id in sorted(store.handles):
            handle = store.handles[db_id]
            flags = store.flags[db_id]
            out.append(
                {
                    "db_id": db_id,
                    "name": handle.name or db_id,
                    "sampled_count": snaps[db_id].sampled_count,
                    "capabilities": sorted(a.value for a in handle.capabilities),
                    "failed": flags.failed,
                    "stale": flags.stale,
                }
            )
        return {"databases": out}

    @app.post("/api/rank")
    def rank_query(fields: QueryFields, request: Request) -> dict:
        q = build_or_400(fields)
        if not store.handles:
            raise HTTPException(503, "no databases registered")
        session = request.headers.get("x-session", "-")
        store.log.append(q, session)
        ranked = rank(q, store.snapshots(), store.tdict, store.support())
        return {
            "query": query_json(q),
            "databases": [
                {
                    "db_id": r.db_id,
                    "name": store.handles[r.db_id].name or r.db_id,
                    "score": r.score,
                    "status": r.status.value,
                    "stale": r.stale,
                }
                for r in ranked
            ],
        }

    @app.post("/api/submit")
    def submit_query(req: SubmitRequest) -> dict:
        q = build_or_400(req)
        if not req.selections:
            raise HTTPException(400, "no databases selected")
        for sel in req.selections:
            if sel.db_id not in store.handles:
                raise HTTPException(400, f"unknown database: {sel.db_id}")

        def one(sel: Selection) -> dict:
            handle = store.handles[sel.db_id]
            try:
                total, records = gateway.search(
                    handle, q, sel.max_records, timeout=config.search_timeout
                )
            except gateway.ServerResponseError as exc:
                return {"db_id": sel.db_id, "status": "error", "error": f"{exc.code}: {exc.message}"}
            except gateway.GatewayError as exc:
                return {"db_id": sel.db_id, "status": "error", "error": str(exc)}
            return {
                "db_id": sel.db_id,
                "status": "ok",
                "total_hits": total,
                "records": [record_json(r, cache.put(r, sel.db_id)) for r in records],
            }

        with ThreadPoolExecutor(max_workers=max(1, len(req.selections))) as pool:
            results = list(pool.map(one, req.selections))
        return {"query": query_json(q), "results": results}

    @app.get("/api/record/{locator}")
    def record_detail(locator: str) -> dict:
        entry = cache.get(locator)
        if entry is None:
            raise HTTPException(404, "record not found or expired")
        return {"db_id": entry.db_id, "record": record_json(entry.record)}

    # -- admin ------------------------------------------------------------

    def require_admin() -> None:
        if not config.admin_enabled:
            raise HTTPException(403, "admin endpoints disabled")

    @app.post("/api/admin/daily-update")
    def admin_daily() -> dict:
        require_admin()
        summary = daily_update(store)
        return {
            "kind": summary.kind,
            "promoted_queries": summary.promoted_queries,
            "per_db": [
                {"db_id": r.db_id, "new_records": r.new_records,
                 "sampled_count": r.sampled_count, "error": r.error}
                for r in summary.per_db
            ],
        }

    @app.post("/api/admin/monthly-update")
    def admin_monthly() -> dict:
        require_admin()
        summary = monthly_update(store)
        return {
            "kind": summary.kind,
            "per_db": [
                {"db_id": r.db_id, "new_records": r.new_records,
                 "sampled_count": r.sampled_count, "error": r.error}
                for r in summary.per_db
            ],
        }

    @app.post("/api/admin/sample/{db_id}")
    def admin_sample(db_id: str) -> dict:
        require_admin()
        if db_id not in store.handles:
            raise HTTPException(404, f"unknown database: {db_id}")
        handle = store.handles[db_id]
        ck = store.knowledge(db_id)
        rid = store.record_ids(db_id)
        try:
            report = sample_database(
                handle, store.library, ck, rid, store.tdict, store.stoplist
            )
        except DatabaseUnreachable as exc:
            store.flags[db_id].failed = True
            raise HTTPException(502, str(exc))
        store.flags[db_id].failed = False
        store.persist(db_id)
        save_report(report, store.data_dir)
        return {
            "db_id": db_id,
            "total_returned": report.total_returned,
            "total_new": report.total_new,
            "sampled_count": ck.sampled_count,
        }

    @app.get("/api/admin/report/{db_id}")
    def admin_report(db_id: str) -> dict:
        require_admin()
        report = load_report(db_id, store.data_dir)
        if report is None:
            raise HTTPException(404, f"no sampling report for {db_id}")
        return {
            "db_id": db_id,
            "entries": [
                {"query_index": e.query_index, "returned": e.returned, "new": e.new,
                 "cumulative": e.cumulative, "error": e.error}
                for e in report.entries
            ],
        }

    @app.get("/api/admin/journal")
    def admin_journal() -> dict:
        require_admin()
        return {"entries": store.journal_lines()}

    if config.static_dir is not None and config.static_dir.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
