#!/usr/bin/env python3
"""Bring up a complete local deployment: three simulated catalog servers
from the fixture corpora, a freshly sampled data directory, and the
broker HTTP API.

Intended for manual exploration and for end-to-end tests of clients. The
registry, data directory, and broker port are printed on startup; the
process runs until interrupted.

Usage:
    python3 scripts/run_demo.py [--port 8040] [--data-dir demo-data]
                                [--static-dir frontend/dist]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import uvicorn

from bibroute.broker import create_app
from bibroute.config import BrokerConfig
from bibroute.maintenance import monthly_update
from bibroute.model import Attribute
from bibroute.queryfilter import TrainingQueryLibrary
from bibroute.sampler import generate_synthetic_queries
from bibroute.simserver import LibraryServer, load_corpus
from bibroute.store import DataStore

FLEET = [
    # db_id, keep server-side record ids, searchable attributes
    ("alpha", True, frozenset(Attribute)),
    ("beta", False, frozenset(Attribute)),
    ("gamma", False, frozenset({Attribute.TITLE, Attribute.SUBJECT})),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8040)
    parser.add_argument("--data-dir", type=Path, default=Path("demo-data"))
    parser.add_argument("--static-dir", type=Path, default=None,
                        help="serve a built web client from this directory")
    parser.add_argument("--queries", type=int, default=30,
                        help="synthetic training queries per bootstrap corpus")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    servers = []
    registry_lines = []
    for db_id, with_ids, caps in FLEET:
        corpus = load_corpus(
            ROOT / "fixtures" / "corpora" / f"{db_id}.txt",
            capabilities=caps,
            with_ids=with_ids,
        )
        server = LibraryServer(corpus)
        server.start_background()
        servers.append(server)
        cap_text = ",".join(sorted(a.value for a in caps))
        registry_lines.append(
            f"{db_id}\t127.0.0.1\t{server.port}\t{cap_text}\t{db_id} library"
        )
        print(f"serving {db_id}: {len(corpus.records)} records on port {server.port}")

    args.data_dir.mkdir(parents=True, exist_ok=True)
    registry = args.data_dir / "registry.tsv"
    registry.write_text("".join(line + "\n" for line in registry_lines))

    store = DataStore(args.data_dir, registry)
    if not store.library.entries:
        lib = TrainingQueryLibrary(path=args.data_dir / "library.tsv")
        for db_id, _, _ in FLEET:
            corpus = load_corpus(ROOT / "fixtures" / "corpora" / f"{db_id}.txt")
            for q in generate_synthetic_queries(
                corpus.records, args.queries, args.seed, store.stoplist
            ):
                if not lib.subsumes_any(q):
                    lib.add(q, "synthetic")
        store.library = lib
        print(f"seeded training library: {len(lib.entries)} queries")
    summary = monthly_update(store)
    for result in summary.per_db:
        print(f"sampled {result.db_id}: N'={result.sampled_count}")

    config = BrokerConfig(
        data_dir=args.data_dir,
        registry_path=registry,
        host=args.host,
        port=args.port,
        static_dir=args.static_dir,
    )
    app = create_app(config, store=store)
    print(f"broker listening on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    for server in servers:
        server.shutdown()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
