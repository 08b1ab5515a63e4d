#!/usr/bin/env python3
"""Measure how fast query-based sampling saturates a database.

Builds (or loads) a corpus, generates seeded synthetic training queries,
runs the sampling pipeline against an in-process evaluator, and writes a
tab-separated progress file: one row per query with the number of
returned, new, and cumulative sampled records. A per-decile summary goes
to stdout so the diminishing-returns shape is visible without plotting.

Usage:
    python3 scripts/sampling_curve.py --records 1000 --queries 300 --seed 1
    python3 scripts/sampling_curve.py --corpus fixtures/corpora/alpha.txt
"""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from bibroute.client import DatabaseHandle
from bibroute.knowledge import ContentKnowledge, RecordIdStore
from bibroute.model import default_stoplist
from bibroute.queryfilter import TrainingQueryLibrary
from bibroute.sampler import generate_synthetic_queries, sample_database
from bibroute.simserver import LibraryCorpus, Mode, evaluate, load_corpus
from bibroute.termdict import GlobalTermDictionary


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", type=Path, help="corpus file; omit to synthesize")
    parser.add_argument("--records", type=int, default=1000,
                        help="synthetic corpus size (ignored with --corpus)")
    parser.add_argument("--queries", type=int, default=300)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--batch-limit", type=int, default=100,
                        help="records fetched per training query")
    parser.add_argument("--output", type=Path, default=Path("sampling_curve.tsv"))
    args = parser.parse_args()

    stoplist = default_stoplist()
    if args.corpus:
        corpus = load_corpus(args.corpus, stoplist=stoplist)
    else:
        from helpers import random_corpus

        records = random_corpus(random.Random(args.seed), args.records, "sysid")
        corpus = LibraryCorpus("synthetic", records, Mode.EXACT, stoplist=stoplist)

    library = TrainingQueryLibrary()
    for q in generate_synthetic_queries(corpus.records, args.queries, args.seed, stoplist):
        library.add(q, "synthetic")

    def in_process_search(handle, q, limit):
        return evaluate(corpus, q, limit)

    report = sample_database(
        DatabaseHandle(corpus.db_id, "localhost", 0),
        library,
        ContentKnowledge(corpus.db_id),
        RecordIdStore(corpus.db_id),
        GlobalTermDictionary(),
        stoplist,
        batch_limit=args.batch_limit,
        search_fn=in_process_search,
    )

    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("query_index\treturned\tnew\tcumulative\n")
        for e in report.entries:
            fh.write(f"{e.query_index}\t{e.returned}\t{e.new}\t{e.cumulative}\n")

    total = len(corpus.records)
    decile = max(1, len(report.entries) // 10)
    print(f"corpus={corpus.db_id} records={total} queries={len(report.entries)}")
    print("decile\tnew_records\tcoverage")
    for i in range(0, len(report.entries), decile):
        chunk = report.entries[i : i + decile]
        new = sum(e.new for e in chunk)
        coverage = chunk[-1].cumulative / total if total else 0.0
        print(f"{i // decile + 1}\t{new}\t{coverage:.3f}")
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
