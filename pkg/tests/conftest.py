from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bibroute.model import default_stoplist

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def stoplist() -> frozenset[str]:
    return default_stoplist()


@pytest.fixture
def data_dir(tmp_path: Path) -> Path:
    d = tmp_path / "data"
    d.mkdir()
    return d


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per release criterion exercised this run."""
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    results: dict[str, str] = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, ()):
            if "test_acceptance" not in getattr(rep, "nodeid", ""):
                continue
            if status == "passed" and getattr(rep, "when", "call") != "call":
                continue
            name = rep.location[2].split("[")[0].split(".")[-1]
            if name in CRITERIA and results.get(name) != "FAIL":
                results[name] = "PASS" if status == "passed" else "FAIL"
    if not results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("release criteria:")
    for name, label in CRITERIA.items():
        if name in results:
            terminalreporter.write_line(f"  [{results[name]}] {label}")


@pytest.fixture
def fleet(tmp_path: Path):
    """Three live simulated servers from the fixture corpora.

    alpha carries system ids; beta has no ids but ISBNs; gamma has neither
    (title+author identity) and cannot search the author attribute.
    Yields the path of a registry file pointing at the live ports.
    """
    from bibroute.model import Attribute
    from bibroute.simserver import LibraryServer, load_corpus

    specs = [
        ("alpha", {}, frozenset(Attribute)),
        ("beta", {"with_ids": False}, frozenset(Attribute)),
        (
            "gamma",
            {"with_ids": False},
            frozenset({Attribute.TITLE, Attribute.SUBJECT}),
        ),
    ]
    servers = []
    lines = []
    for db_id, kwargs, caps in specs:
        corpus = load_corpus(
            FIXTURES / "corpora" / f"{db_id}.txt", capabilities=caps, **kwargs
        )
        server = LibraryServer(corpus)
        server.start_background()
        servers.append(server)
        cap_text = ",".join(sorted(a.value for a in caps))
        lines.append(f"{db_id}\t127.0.0.1\t{server.port}\t{cap_text}\t{db_id} library")
    registry = tmp_path / "registry.tsv"
    registry.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    yield registry
    for server in servers:
        server.shutdown()
