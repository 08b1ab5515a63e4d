"""Content sampling: synthetic training-query generation and the
query-evaluation pipeline that feeds the record filter and summarizer.

Synthetic queries bootstrap the content knowledge. Each one is built from
a randomly chosen bootstrap-corpus record: pick title, subject, or both;
draw up to four distinct non-stopword terms per chosen attribute, all
subject terms coming from a single subject value.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .client import (
    DatabaseHandle,
    GatewayError,
    SearchConnectionRefused,
    search,
)
from .knowledge import ContentKnowledge, RecordIdStore, filter_new, summarize
from .model import Attribute, BibRecord, ConjunctiveQuery, tokenize
from .queryfilter import TrainingQueryLibrary
from .termdict import GlobalTermDictionary

MAX_TERMS_PER_ATTRIBUTE = 4
DEFAULT_BATCH_LIMIT = 100


class InsufficientCorpus(RuntimeError):
    """The bootstrap corpus cannot yield the requested number of queries."""


class DatabaseUnreachable(RuntimeError):
    pass


def term_count_choice(rng: random.Random, available: int) -> int:
    """Uniform draw in [1, min(4, available)]."""
    return rng.randint(1, min(MAX_TERMS_PER_ATTRIBUTE, available))


_MODES = (
    (Attribute.TITLE,),
    (Attribute.SUBJECT,),
    (Attribute.TITLE, Attribute.SUBJECT),
)


def generate_synthetic_queries(
    corpus: list[BibRecord],
    k: int,
    seed: int,
    stoplist: frozenset[str],
) -> list[ConjunctiveQuery]:
    """Deterministically generate k synthetic training queries.

    Attempts whose chosen attribute yields no usable terms are discarded
    and retried, up to k * 100 attempts in total.
    """
    if not corpus:
        raise InsufficientCorpus("bootstrap corpus is empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = random.Random(seed)
    queries: list[ConjunctiveQuery] = []
    budget = k * 100
    while len(queries) < k:
        if budget <= 0:
            raise InsufficientCorpus(
                f"could not build {k} queries within the retry budget"
            )
        budget -= 1
        record = rng.choice(corpus)
        attrs = _MODES[rng.randrange(3)]
        preds: dict[Attribute, frozenset[str]] = {}
        ok = True
        for attr in attrs:
            if attr is Attribute.TITLE:
                pool = sorted(set(tokenize(record.title, stoplist)))
            else:
                if not record.subjects:
                    ok = False
                    break
                value = rng.choice(record.subjects)
                pool = sorted(set(tokenize(value, stoplist)))
            if not pool:
                ok = False
                break
            count = term_count_choice(rng, len(pool))
            preds[attr] = frozenset(rng.sample(pool, count))
        if not ok:
            continue
        queries.append(ConjunctiveQuery(preds))
    return queries


@dataclass
class ReportEntry:
    query_index: int
    returned: int
    new: int
    cumulative: int
    timestamp: float
    error: str = ""


@dataclass
class SamplingReport:
    db_id: str
    entries: list[ReportEntry] = field(default_factory=list)
    failed: bool = False

    @property
    def total_returned(self) -> int:
        return sum(e.returned for e in self.entries)

    @property
    def total_new(self) -> int:
        return sum(e.new for e in self.entries)


def sample_database(
    handle: DatabaseHandle,
    lib: TrainingQueryLibrary,
    ck: ContentKnowledge,
    store: RecordIdStore,
    tdict: GlobalTermDictionary,
    stoplist: frozenset[str],
    batch_limit: int = DEFAULT_BATCH_LIMIT,
    search_fn: Callable = search,
    progress: Callable[[ReportEntry], None] | None = None,
) -> SamplingReport:
    """Run every training query through search -> filter -> summarize.

    A query that errors is logged in the report and skipped; only a
    connection refused before any query completes marks the whole run
    failed.
    """
    report = SamplingReport(db_id=handle.db_id)
    for index, q in enumerate(lib.queries()):
        try:
            total, records = search_fn(handle, q, batch_limit)
        except SearchConnectionRefused as exc:
            if not report.entries:
                report.failed = True
                raise DatabaseUnreachable(str(exc)) from exc
            entry = ReportEntry(index, 0, 0, ck.sampled_count, time.time(), "refused")
            report.entries.append(entry)
            if progress:
                progress(entry)
            continue
        except GatewayError as exc:
            entry = ReportEntry(index, 0, 0, ck.sampled_count, time.time(), str(exc))
            report.entries.append(entry)
            if progress:
                progress(entry)
            continue
        fresh = filter_new(store, records)
        summarize(ck, tdict, fresh, stoplist)
        entry = ReportEntry(index, len(records), len(fresh), ck.sampled_count, time.time())
        report.entries.append(entry)
        if progress:
            progress(entry)
    return report


def save_report(report: SamplingReport, data_dir: Path) -> Path:
    """Tab-separated progress file; one row per training query."""
    path = Path(data_dir) / "reports" / f"{report.db_id}.tsv"
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["query_index\treturned\tnew\tcumulative\ttimestamp\terror"]
    for e in report.entries:
        lines.append(
            f"{e.query_index}\t{e.returned}\t{e.new}\t{e.cumulative}\t{e.timestamp:.3f}\t{e.error}"
        )
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def load_report(db_id: str, data_dir: Path) -> SamplingReport | None:
    path = Path(data_dir) / "reports" / f"{db_id}.tsv"
    if not path.exists():
        return None
    report = SamplingReport(db_id=db_id)
    lines = path.read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        if not line:
            continue
        idx, returned, new, cumulative, ts, *rest = line.split("\t")
        report.entries.append(
            ReportEntry(
                int(idx), int(returned), int(new), int(cumulative), float(ts),
                rest[0] if rest else "",
            )
        )
    return report
