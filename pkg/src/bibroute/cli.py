"""Operator command line.

Paths and ports resolve with precedence flag > environment variable >
built-in default; the relevant variables are BIBROUTE_DATA_DIR,
BIBROUTE_REGISTRY and BIBROUTE_STOPLIST.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from .client import DatabaseHandle, load_registry
from .config import BrokerConfig
from .maintenance import daily_update, monthly_update
from .model import Attribute, EmptyQuery, build_query, default_stoplist, load_stoplist
from .queryfilter import TrainingQueryLibrary, save_library
from .ranker import rank
from .sampler import (
    DatabaseUnreachable,
    InsufficientCorpus,
    generate_synthetic_queries,
    sample_database,
    save_report,
)
from .simserver import LibraryServer, Mode, ParseError, load_corpus
from .store import DataStore

_DATA_DIR_OPT = click.option(
    "--data-dir", envvar="BIBROUTE_DATA_DIR", default="data",
    type=click.Path(path_type=Path), show_default=True,
)
_REGISTRY_OPT = click.option(
    "--registry", envvar="BIBROUTE_REGISTRY", required=True,
    type=click.Path(exists=True, path_type=Path),
)
_STOPLIST_OPT = click.option(
    "--stoplist", envvar="BIBROUTE_STOPLIST", default=None,
    type=click.Path(exists=True, path_type=Path),
)


@click.group()
def main() -> None:
    """Query-routing broker for bibliographic catalog servers."""


@main.command("gen-queries")
@click.option("--corpus", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--count", required=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--output", required=True, type=click.Path(path_type=Path))
@_STOPLIST_OPT
def gen_queries(corpus: Path, count: int, seed: int, output: Path, stoplist: Path | None) -> None:
    """Generate synthetic training queries from a bootstrap corpus."""
    stop = load_stoplist(stoplist) if stoplist else default_stoplist()
    try:
        loaded = load_corpus(corpus)
        queries = generate_synthetic_queries(loaded.records, count, seed, stop)
    except (ParseError, InsufficientCorpus) as exc:
        raise click.ClickException(str(exc))
    from datetime import datetime, timezone

    from .queryfilter import TrainingQuery

    lib = TrainingQueryLibrary()
    # Fixed timestamp keeps the output byte-identical across reruns.
    epoch = datetime.fromtimestamp(0, timezone.utc)
    for q in queries:
        lib.entries.append(TrainingQuery(q, "synthetic", epoch))
    save_library(lib, output)
    click.echo(f"wrote {len(queries)} queries to {output}")


@main.command()
@_REGISTRY_OPT
@click.option("--db", "db_id", default="all", show_default=True)
@click.option("--library", required=True, type=click.Path(exists=True, path_type=Path))
@_DATA_DIR_OPT
@_STOPLIST_OPT
@click.option("--batch-limit", default=100, show_default=True, type=int)
def sample(registry: Path, db_id: str, library: Path, data_dir: Path,
           stoplist: Path | None, batch_limit: int) -> None:
    """Sample one database (or all) with a training query library."""
    store = DataStore(data_dir, registry, stoplist)
    from .queryfilter import load_library

    lib = load_library(library)
    targets = sorted(store.handles) if db_id == "all" else [db_id]
    failures = 0
    for target in targets:
        if target not in store.handles:
            raise click.ClickException(f"unknown database: {target}")
        handle = store.handles[target]
        ck = store.knowledge(target)
        rid = store.record_ids(target)
        click.echo(f"== {target} ==")
        click.echo("query\treturned\tnew\tN'")

        def show(entry) -> None:
            click.echo(f"{entry.query_index}\t{entry.returned}\t{entry.new}\t{entry.cumulative}")

        try:
            report = sample_database(
                handle, lib, ck, rid, store.tdict, store.stoplist,
                batch_limit=batch_limit, progress=show,
            )
        except DatabaseUnreachable as exc:
            click.echo(f"FAILED: {exc}", err=True)
            failures += 1
            continue
        store.persist(target)
        save_report(report, store.data_dir)
        click.echo(f"total returned={report.total_returned} new={report.total_new} N'={ck.sampled_count}")
    store.close()
    if failures:
        sys.exit(1)


@main.command("rank")
@click.option("--title", default="")
@click.option("--author", default="")
@click.option("--subject", default="")
@_REGISTRY_OPT
@_DATA_DIR_OPT
@_STOPLIST_OPT
@click.option("--format", "fmt", type=click.Choice(["table", "tsv"]), default="table")
def rank_cmd(title: str, author: str, subject: str, registry: Path,
             data_dir: Path, stoplist: Path | None, fmt: str) -> None:
    """Rank registered databases for an ad hoc query."""
    store = DataStore(data_dir, registry, stoplist)
    try:
        q = build_query(title, author, subject, store.stoplist)
    except EmptyQuery:
        raise click.ClickException("query is empty after tokenization")
    ranked = rank(q, store.snapshots(), store.tdict, store.support())
    if fmt == "table":
        click.echo(f"{'db':<16}{'score':>12}  status")
    for r in ranked:
        if fmt == "tsv":
            click.echo(f"{r.db_id}\t{r.score:.4f}\t{r.status.value}")
        else:
            click.echo(f"{r.db_id:<16}{r.score:>12.4f}  {r.status.value}")
    store.close()


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@_DATA_DIR_OPT
@click.option("--registry", envvar="BIBROUTE_REGISTRY",
              type=click.Path(exists=True, path_type=Path), default=None)
@_STOPLIST_OPT
@click.option("--static-dir", type=click.Path(path_type=Path), default=None)
def serve(config_path: Path | None, host: str | None, port: int | None,
          data_dir: Path, registry: Path | None, stoplist: Path | None,
          static_dir: Path | None) -> None:
    """Launch the broker HTTP service."""
    import uvicorn

    from .broker import create_app

    cfg = BrokerConfig.from_file(config_path) if config_path else BrokerConfig()
    if registry is not None:
        cfg.registry_path = registry
    if data_dir is not None:
        cfg.data_dir = data_dir
    if stoplist is not None:
        cfg.stoplist_path = stoplist
    if host is not None:
        cfg.host = host
    if port is not None:
        cfg.port = port
    if static_dir is not None:
        cfg.static_dir = static_dir
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port)


@main.command("serve-sim")
@click.option("--corpus", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", required=True, type=int)
@click.option("--mode", type=click.Choice([m.value for m in Mode]), default="exact",
              show_default=True)
@click.option("--capabilities", default="title,author,subject", show_default=True)
@click.option("--no-ids", is_flag=True, default=False)
@click.option("--db-id", default=None)
def serve_sim(corpus: Path, host: str, port: int, mode: str,
              capabilities: str, no_ids: bool, db_id: str | None) -> None:
    """Launch one simulated catalog server."""
    caps = frozenset(Attribute(c.strip()) for c in capabilities.split(",") if c.strip())
    try:
        loaded = load_corpus(corpus, db_id=db_id, mode=Mode(mode),
                             capabilities=caps, with_ids=not no_ids)
    except (ParseError, ValueError) as exc:
        raise click.ClickException(str(exc))
    server = LibraryServer(loaded, host, port)
    click.echo(f"serving {loaded.db_id} ({loaded.total_count} records) on {host}:{server.port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


@main.command()
@click.argument("which", type=click.Choice(["daily", "monthly"]))
@_REGISTRY_OPT
@_DATA_DIR_OPT
@_STOPLIST_OPT
def maintain(which: str, registry: Path, data_dir: Path, stoplist: Path | None) -> None:
    """Trigger a maintenance run on demand."""
    store = DataStore(data_dir, registry, stoplist)
    summary = daily_update(store) if which == "daily" else monthly_update(store)
    click.echo(f"{summary.kind} run: {summary.as_journal_details()}")
    store.close()
    if any(r.error for r in summary.per_db):
        sys.exit(1)


@main.command()
@_REGISTRY_OPT
@_DATA_DIR_OPT
@_STOPLIST_OPT
@click.option("--format", "fmt", type=click.Choice(["table", "tsv"]), default="table")
def stats(registry: Path, data_dir: Path, stoplist: Path | None, fmt: str) -> None:
    """Print storage sizes: dictionary entries, knowledge sizes, record ids."""
    store = DataStore(data_dir, registry, stoplist)
    rows = [("dict." + a.value, store.tdict.size(a)) for a in Attribute]
    for db in sorted(store.handles):
        ck = store.knowledge(db)
        rid = store.record_ids(db)
        rows.append((f"{db}.sampled", ck.sampled_count))
        rows.append((f"{db}.tf_entries", len(ck.tf)))
        rows.append((f"{db}.record_ids", rid.total()))
    for name, value in rows:
        click.echo(f"{name}\t{value}" if fmt == "tsv" else f"{name:<24}{value:>10}")
    store.close()


if __name__ == "__main__":
    main()
