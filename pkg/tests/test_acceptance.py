"""Acceptance suite: one test per release criterion.

Every test here checks a single externally stated guarantee of the
system at its pinned tolerance, using only independent oracles (hand
computations, brute-force scans, exact rational arithmetic) as the
reference. The terminal summary prints one pass/fail line per
criterion; see ``pytest_terminal_summary`` in conftest.
"""
from __future__ import annotations

import random
import socket
import time

import pytest

from bibroute import wire
from bibroute.client import DatabaseHandle, search
from bibroute.knowledge import (
    ContentKnowledge,
    RecordIdStore,
    summarize,
)
from bibroute.maintenance import daily_update, monthly_update
from bibroute.model import Attribute, BibRecord, ConjunctiveQuery
from bibroute.queryfilter import TrainingQueryLibrary, predicate_subsumed
from bibroute.ranker import DbStatus, DbSupport, rank, score
from bibroute.sampler import generate_synthetic_queries, sample_database
from bibroute.simserver import LibraryCorpus, LibraryServer, Mode, evaluate
from bibroute.store import DataStore
from bibroute.termdict import GlobalTermDictionary

from helpers import (
    WORDS,
    oracle_record_terms,
    oracle_result_set,
    oracle_score,
    random_corpus,
    random_query,
)

# Labels for the terminal summary, keyed by test function name.
CRITERIA = {
    "test_estimator_hand_value_and_brute_force": (
        "estimator: hand-computed value to 1e-12; exact agreement with a "
        "brute-force scorer on 1,000 random (corpus, query) pairs, < 5 s"
    ),
    "test_full_sample_single_term_exactness": (
        "full sample: 500-record database sampled to N' = 500; 200 random "
        "single-term scores equal linear-scan result sizes exactly, < 30 s"
    ),
    "test_score_range": (
        "score range: 0 <= score <= N' on 10,000 query/snapshot pairs"
    ),
    "test_score_monotonicity": (
        "monotonicity: a record with all query terms strictly raises the "
        "score, one with none never raises it, 1,000 trials"
    ),
    "test_subsumption_reference_cases_and_order_axioms": (
        "subsumption: three reference cases true/true/false; reflexive over "
        "10,000 queries; transitive over 10,000 chains"
    ),
    "test_subsumption_implies_result_containment": (
        "subsumption soundness: results(q1) a subset of results(q2) under "
        "exact evaluation, 1,000 random triples"
    ),
    "test_resampling_idempotence_across_identity_policies": (
        "dedup: re-running an identical training batch leaves (N', TF') "
        "unchanged for system-id, isbn, and title+author corpora"
    ),
    "test_diminishing_new_records": (
        "sampling curve: first decile of queries yields >= new records than "
        "the last decile, 1,000-record corpus, 300 queries, 5 seeds"
    ),
    "test_unsupported_database_ranks_last": (
        "failure ranking: a database rejecting a query attribute ranks "
        "strictly last regardless of its N'"
    ),
    "test_monthly_determinism_and_daily_growth": (
        "maintenance: monthly rebuild reproduces byte-identical snapshots; "
        "daily promotion grows N' by the hand-counted new matches"
    ),
    "test_wire_golden_fixtures": (
        "wire protocol: golden request/response byte fixtures round-trip "
        "through client and live server; malformed fixtures raise the "
        "specified errors"
    ),
}


def build_snapshot(
    records: list[BibRecord],
    stoplist: frozenset[str],
    tdict: GlobalTermDictionary | None = None,
    db_id: str = "db",
) -> tuple[ContentKnowledge, GlobalTermDictionary]:
    tdict = tdict or GlobalTermDictionary()
    ck = ContentKnowledge(db_id)
    summarize(ck, tdict, records, stoplist)
    return ck, tdict


def extend_query(rng: random.Random, q: ConjunctiveQuery) -> ConjunctiveQuery:
    """A random query that q's base is guaranteed to subsume."""
    preds = {attr: set(terms) for attr, terms in q.predicates.items()}
    for _ in range(rng.randint(0, 2)):
        attr = rng.choice(list(Attribute))
        preds.setdefault(attr, set()).update(
            rng.sample(WORDS, rng.randint(1, 2))
        )
    for attr in list(preds):
        if rng.random() < 0.5:
            preds[attr].update(rng.sample(WORDS, rng.randint(1, 2)))
    return ConjunctiveQuery(
        {attr: frozenset(terms) for attr, terms in preds.items()}
    )


class TestEstimator:
    def test_estimator_hand_value_and_brute_force(self, stoplist):
        started = time.perf_counter()

        # Eight records chosen so that, scanning by hand: "digital" is in
        # four titles, "library" in two titles, "systems" in six subjects.
        rows = [
            ("Digital Library Design", "information systems"),
            ("Digital Archives", "storage systems"),
            ("Digital Catalog Methods", "catalog systems"),
            ("Digital Text Mining", "mining systems"),
            ("Library Automation", "automation systems"),
            ("Information Retrieval", "retrieval systems"),
            ("Compiler Construction", "programming languages"),
            ("Music Theory", "art history"),
        ]
        records = [
            BibRecord(title=t, authors=(), subjects=(s,)) for t, s in rows
        ]
        ck, tdict = build_snapshot(records, stoplist)
        q = ConjunctiveQuery(
            {
                Attribute.TITLE: frozenset({"digital", "library"}),
                Attribute.SUBJECT: frozenset({"systems"}),
            }
        )
        expected = 8 * (4 / 8) * (2 / 8) * (6 / 8)  # 0.75 by hand
        got = score(q, ck, tdict)
        assert got == pytest.approx(expected, rel=1e-12)

        rng = random.Random(1001)
        for _ in range(1000):
            corpus = random_corpus(rng, rng.randint(1, 30))
            ck, tdict = build_snapshot(corpus, stoplist)
            q = random_query(rng, corpus, stoplist)
            assert score(q, ck, tdict) == oracle_score(corpus, q, stoplist)

        assert time.perf_counter() - started < 5.0

    def test_full_sample_single_term_exactness(self, stoplist):
        started = time.perf_counter()
        rng = random.Random(2002)
        corpus = random_corpus(rng, 500, "sysid")
        server = LibraryServer(
            LibraryCorpus("full", list(corpus), Mode.EXACT, stoplist=stoplist)
        )
        server.start_background()
        try:
            handle = DatabaseHandle("full", "127.0.0.1", server.port)
            lib = TrainingQueryLibrary()
            for record in corpus:
                terms = oracle_record_terms(record, Attribute.TITLE, stoplist)
                lib.add(
                    ConjunctiveQuery({Attribute.TITLE: frozenset(terms)}),
                    "synthetic",
                )
            ck = ContentKnowledge("full")
            rid = RecordIdStore("full")
            tdict = GlobalTermDictionary()
            sample_database(
                handle, lib, ck, rid, tdict, stoplist, batch_limit=1000
            )
            assert ck.sampled_count == 500

            pools = {
                attr: sorted(
                    {
                        t
                        for r in corpus
                        for t in oracle_record_terms(r, attr, stoplist)
                    }
                )
                for attr in Attribute
            }
            for _ in range(200):
                attr = rng.choice(list(Attribute))
                term = rng.choice(pools[attr])
                q = ConjunctiveQuery({attr: frozenset({term})})
                truth = sum(
                    1
                    for r in corpus
                    if term in oracle_record_terms(r, attr, stoplist)
                )
                assert score(q, ck, tdict) == float(truth)
        finally:
            server.shutdown()
        assert time.perf_counter() - started < 30.0

    def test_score_range(self, stoplist):
        rng = random.Random(3003)
        snapshots = []
        corpora = []
        for _ in range(25):
            corpus = random_corpus(rng, rng.randint(0, 40))
            corpora.append(corpus)
            snapshots.append(build_snapshot(corpus, stoplist))
        term_pool = WORDS + ["absentterm", "neverseen"]
        for _ in range(10_000):
            index = rng.randrange(len(snapshots))
            ck, tdict = snapshots[index]
            corpus = corpora[index]
            if corpus and rng.random() < 0.7:
                q = random_query(rng, corpus, stoplist)
            else:
                preds = {
                    attr: frozenset(
                        rng.sample(term_pool, rng.randint(1, 3))
                    )
                    for attr in rng.sample(list(Attribute), rng.randint(1, 3))
                }
                q = ConjunctiveQuery(preds)
            value = score(q, ck, tdict)
            assert 0.0 <= value <= ck.sampled_count

    def test_score_monotonicity(self, stoplist):
        rng = random.Random(4004)
        for _ in range(1000):
            corpus = random_corpus(rng, rng.randint(1, 15))
            q = random_query(rng, corpus, stoplist)
            tdict = GlobalTermDictionary()
            base, _ = build_snapshot(corpus, stoplist, tdict)
            before = score(q, base, tdict)

            covering = BibRecord(
                title=" ".join(sorted(q.predicates.get(Attribute.TITLE, ()))) or "pad",
                authors=tuple(sorted(q.predicates.get(Attribute.AUTHOR, ()))),
                subjects=(
                    " ".join(sorted(q.predicates.get(Attribute.SUBJECT, ()))) or "pad",
                ),
            )
            grown, _ = build_snapshot(corpus + [covering], stoplist, tdict)
            assert score(q, grown, tdict) > before

            # Tokens chosen to be disjoint from anything a corpus-drawn
            # query can contain, including single-letter author initials.
            unrelated = BibRecord(
                title="zzzalien wwwalien",
                authors=("Qqqalien Xxalien",),
                subjects=("vvvalien uualien",),
            )
            padded, _ = build_snapshot(corpus + [unrelated], stoplist, tdict)
            assert score(q, padded, tdict) <= before


class TestSubsumption:
    def test_subsumption_reference_cases_and_order_axioms(self, stoplist):
        q1 = ConjunctiveQuery({Attribute.TITLE: frozenset({"digital", "library"})})
        q2 = ConjunctiveQuery({Attribute.TITLE: frozenset({"digital"})})
        assert predicate_subsumed(q1, q2) is True

        q1 = ConjunctiveQuery(
            {
                Attribute.TITLE: frozenset({"database", "management", "project"}),
                Attribute.SUBJECT: frozenset({"database", "management"}),
            }
        )
        q2 = ConjunctiveQuery(
            {Attribute.TITLE: frozenset({"database", "management"})}
        )
        assert predicate_subsumed(q1, q2) is True

        q3 = ConjunctiveQuery({Attribute.TITLE: frozenset({"computer", "management"})})
        q4 = ConjunctiveQuery({Attribute.TITLE: frozenset({"bussiness", "management"})})
        assert predicate_subsumed(q3, q4) is False

        rng = random.Random(5005)
        corpus = random_corpus(rng, 40)
        for _ in range(10_000):
            q = random_query(rng, corpus, stoplist)
            assert predicate_subsumed(q, q)
        for _ in range(10_000):
            base = random_query(rng, corpus, stoplist)
            middle = extend_query(rng, base)
            top = extend_query(rng, middle)
            assert predicate_subsumed(middle, base)
            assert predicate_subsumed(top, middle)
            assert predicate_subsumed(top, base)

    def test_subsumption_implies_result_containment(self, stoplist):
        rng = random.Random(6006)
        for _ in range(1000):
            records = random_corpus(rng, rng.randint(1, 25))
            corpus = LibraryCorpus("c", records, Mode.EXACT, stoplist=stoplist)
            q2 = random_query(rng, records, stoplist)
            q1 = extend_query(rng, q2)
            assert predicate_subsumed(q1, q2)
            _, wide = evaluate(corpus, q2, len(records))
            _, narrow = evaluate(corpus, q1, len(records))
            wide_ids = {r.system_id for r in wide}
            assert {r.system_id for r in narrow} <= wide_ids


class TestSampling:
    def test_resampling_idempotence_across_identity_policies(self, stoplist):
        cases = [
            ("sysid", True, 11),
            ("isbn", False, 12),
            ("titleauthor", False, 13),
        ]
        for policy, with_ids, seed in cases:
            rng = random.Random(seed)
            records = random_corpus(rng, 60, policy)
            server = LibraryServer(
                LibraryCorpus(
                    policy, records, Mode.EXACT,
                    with_ids=with_ids, stoplist=stoplist,
                )
            )
            server.start_background()
            try:
                handle = DatabaseHandle(policy, "127.0.0.1", server.port)
                lib = TrainingQueryLibrary()
                for q in generate_synthetic_queries(records, 25, 7, stoplist):
                    lib.add(q, "synthetic")
                ck = ContentKnowledge(policy)
                rid = RecordIdStore(policy)
                tdict = GlobalTermDictionary()
                sample_database(handle, lib, ck, rid, tdict, stoplist)
                first = (ck.sampled_count, dict(ck.tf), rid.total())
                assert ck.sampled_count > 0
                sample_database(handle, lib, ck, rid, tdict, stoplist)
                assert (ck.sampled_count, dict(ck.tf), rid.total()) == first
            finally:
                server.shutdown()

    def test_diminishing_new_records(self, stoplist):
        for seed in range(1, 6):
            records = random_corpus(random.Random(1000 + seed), 1000, "sysid")
            corpus = LibraryCorpus("big", records, Mode.EXACT, stoplist=stoplist)

            def in_process_search(handle, q, limit):
                return evaluate(corpus, q, limit)

            lib = TrainingQueryLibrary()
            for q in generate_synthetic_queries(records, 300, seed, stoplist):
                lib.add(q, "synthetic")
            report = sample_database(
                DatabaseHandle("big", "127.0.0.1", 1),
                lib,
                ContentKnowledge("big"),
                RecordIdStore("big"),
                GlobalTermDictionary(),
                stoplist,
                search_fn=in_process_search,
            )
            assert len(report.entries) == 300
            first_decile = sum(e.new for e in report.entries[:30])
            last_decile = sum(e.new for e in report.entries[-30:])
            assert first_decile >= last_decile, f"seed {seed}"


class TestRankingAndMaintenance:
    def test_unsupported_database_ranks_last(self, stoplist):
        rng = random.Random(8008)
        tdict = GlobalTermDictionary()
        q = ConjunctiveQuery({Attribute.AUTHOR: frozenset({"chen"})})
        # The rejecting database gets by far the largest sample and the
        # highest would-be score; it must still land at the bottom.
        author_heavy = [
            BibRecord(title=f"work {i}", authors=("Chen, Wei",), subjects=())
            for i in range(50)
        ]
        snapshots = {
            "small": build_snapshot(random_corpus(rng, 5), stoplist, tdict)[0],
            "medium": build_snapshot(random_corpus(rng, 20), stoplist, tdict)[0],
            "huge": build_snapshot(author_heavy, stoplist, tdict, "huge")[0],
        }
        support = {
            "small": DbSupport(),
            "medium": DbSupport(),
            "huge": DbSupport(
                capabilities=frozenset({Attribute.TITLE, Attribute.SUBJECT})
            ),
        }
        ranked = rank(q, snapshots, tdict, support)
        assert ranked[-1].db_id == "huge"
        assert ranked[-1].status is DbStatus.UNSUPPORTED
        assert [r.db_id for r in ranked[:-1]] == sorted(
            ["small", "medium"],
            key=lambda d: (-score(q, snapshots[d], tdict), d),
        )

    def test_monthly_determinism_and_daily_growth(self, fleet, tmp_path, stoplist):
        data = tmp_path / "acceptance-data"
        store = DataStore(data, fleet)
        try:
            # One training query that matches exactly one alpha record
            # (AL-0006, "Compiler Construction Principles").
            store.library.add(
                ConjunctiveQuery({Attribute.TITLE: frozenset({"compiler"})}),
                "synthetic",
            )
            monthly_update(store)
            first = {
                db: (data / "ck" / f"{db}.tsv").read_bytes()
                for db in ("alpha", "beta", "gamma")
            }
            monthly_update(store)
            second = {
                db: (data / "ck" / f"{db}.tsv").read_bytes()
                for db in ("alpha", "beta", "gamma")
            }
            assert first == second

            # Hand count on the alpha fixture: exactly two records carry
            # "digital" in the title (AL-0001, AL-0005), and neither
            # matched the training query above.
            before = store.knowledge("alpha").sampled_count
            store.log.append(
                ConjunctiveQuery({Attribute.TITLE: frozenset({"digital"})})
            )
            summary = daily_update(store)
            assert summary.promoted_queries == 1
            assert store.knowledge("alpha").sampled_count == before + 2
        finally:
            store.close()


class TestWireProtocol:
    def test_wire_golden_fixtures(self, fleet, fixtures_dir):
        wire_dir = fixtures_dir / "wire"
        golden_request = (wire_dir / "request_basic.txt").read_bytes()
        golden_response = (wire_dir / "response_basic.txt").read_bytes()

        q = ConjunctiveQuery({Attribute.TITLE: frozenset({"digital"})})
        assert wire.serialize_request("alpha", q, 10).encode() == golden_request

        registry = {
            line.split("\t")[0]: int(line.split("\t")[2])
            for line in fleet.read_text().splitlines()
        }
        with socket.create_connection(("127.0.0.1", registry["alpha"]), 5) as sock:
            sock.sendall(golden_request)
            sock.shutdown(socket.SHUT_WR)
            chunks = []
            while chunk := sock.recv(65536):
                chunks.append(chunk)
        assert b"".join(chunks) == golden_response

        total, records = search(
            DatabaseHandle("alpha", "127.0.0.1", registry["alpha"]), q, 10
        )
        assert total == 2
        assert [r.system_id for r in records] == ["AL-0001", "AL-0005"]

        for name in (
            "request_missing_end.txt",
            "request_bad_attr.txt",
            "request_bad_verb.txt",
        ):
            with pytest.raises(wire.ProtocolError):
                wire.parse_request((wire_dir / name).read_text())
        with pytest.raises(wire.ProtocolError):
            wire.parse_response((wire_dir / "response_truncated.txt").read_text())
        code, _ = wire.parse_error_line(
            (wire_dir / "err_unsupported.txt").read_text().strip()
        )
        assert code == "UNSUPPORTED"

        with socket.create_connection(("127.0.0.1", registry["alpha"]), 5) as sock:
            sock.sendall((wire_dir / "request_bad_verb.txt").read_bytes())
            sock.shutdown(socket.SHUT_WR)
            reply = sock.recv(65536)
        assert reply.startswith(b"ERR BADREQUEST")
