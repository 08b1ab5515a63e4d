"""Per-database sampled content knowledge and the record-id store.

ContentKnowledge holds the sampled-record count and tuple frequencies
keyed by (attribute, global term id). The tuple frequency of a term in an
attribute is the number of *sampled records* containing it, not the number
of occurrences. The companion RecordIdStore remembers which records have
already been summarized so duplicates from overlapping query results are
discarded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .model import Attribute, BibRecord, record_identity, IdentityKind
from .termdict import GlobalTermDictionary, StorageFailure


@dataclass
class ContentKnowledge:
    db_id: str
    sampled_count: int = 0
    tf: dict[tuple[Attribute, int], int] = field(default_factory=dict)
    version: int = 0

    def copy(self) -> "ContentKnowledge":
        return ContentKnowledge(self.db_id, self.sampled_count, dict(self.tf), self.version)


@dataclass
class RecordIdStore:
    db_id: str
    keys: dict[IdentityKind, set[str]] = field(
        default_factory=lambda: {k: set() for k in IdentityKind}
    )

    def __contains__(self, identity) -> bool:
        return identity.key in self.keys[identity.kind]

    def add(self, identity) -> None:
        self.keys[identity.kind].add(identity.key)

    def total(self) -> int:
        return sum(len(s) for s in self.keys.values())


def filter_new(store: RecordIdStore, records: list[BibRecord]) -> list[BibRecord]:
    """Keep records whose identity is unseen; insert the kept identities.

    Order is preserved and in-batch duplicates collapse to their first
    occurrence.
    """
    fresh = []
    for record in records:
        identity = record_identity(record)
        if identity in store:
            continue
        store.add(identity)
        fresh.append(record)
    return fresh


def summarize(
    ck: ContentKnowledge,
    tdict: GlobalTermDictionary,
    records: list[BibRecord],
    stoplist: frozenset[str],
) -> ContentKnowledge:
    """Fold already-filtered records into the content knowledge.

    Each record contributes 1 to the tuple frequency of every distinct
    term per attribute, and 1 to the sampled count.
    """
    for record in records:
        ck.sampled_count += 1
        for attr, terms in record.attribute_terms(stoplist).items():
            for term in terms:
                key = (attr, tdict.get_or_assign(attr, term))
                ck.tf[key] = ck.tf.get(key, 0) + 1
    ck.version += 1
    return ck


def tuple_frequency(
    ck: ContentKnowledge, attr: Attribute, term: str, tdict: GlobalTermDictionary
) -> int:
    """Stored count for (attr, term); 0 when unknown to dictionary or ck."""
    term_id = tdict.lookup(attr, term)
    if term_id is None:
        return 0
    return ck.tf.get((attr, term_id), 0)


def reset(ck: ContentKnowledge, store: RecordIdStore) -> None:
    """Clear sampled state for a rebuild; the term dictionary is untouched."""
    ck.sampled_count = 0
    ck.tf.clear()
    ck.version += 1
    for keys in store.keys.values():
        keys.clear()


# ---------------------------------------------------------------------------
# Persistence: diff-able tab-separated snapshots. The version counter is
# runtime-only (it tracks in-memory publishes), so rebuilding an unchanged
# database reproduces the snapshot file byte for byte.

def save_content_knowledge(ck: ContentKnowledge, data_dir: Path) -> Path:
    path = Path(data_dir) / "ck" / f"{ck.db_id}.tsv"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"{ck.db_id}\t{ck.sampled_count}"]
        for (attr, term_id), count in sorted(
            ck.tf.items(), key=lambda item: (item[0][0].value, item[0][1])
        ):
            lines.append(f"{attr.value}\t{term_id}\t{count}")
        tmp = path.with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    return path


def load_content_knowledge(db_id: str, data_dir: Path) -> ContentKnowledge:
    path = Path(data_dir) / "ck" / f"{db_id}.tsv"
    if not path.exists():
        return ContentKnowledge(db_id)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    header_db, count_text = lines[0].split("\t")
    ck = ContentKnowledge(header_db, int(count_text), {})
    for line in lines[1:]:
        if not line:
            continue
        attr_name, id_text, tf_text = line.split("\t")
        ck.tf[(Attribute(attr_name), int(id_text))] = int(tf_text)
    return ck


def save_record_ids(store: RecordIdStore, data_dir: Path) -> None:
    base = Path(data_dir) / "rid"
    try:
        base.mkdir(parents=True, exist_ok=True)
        for kind, keys in store.keys.items():
            path = base / f"{store.db_id}.{kind.value}.txt"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(
                "".join(f"{key}\n" for key in sorted(keys)), encoding="utf-8"
            )
            tmp.replace(path)
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc


def load_record_ids(db_id: str, data_dir: Path) -> RecordIdStore:
    store = RecordIdStore(db_id)
    base = Path(data_dir) / "rid"
    for kind in IdentityKind:
        path = base / f"{db_id}.{kind.value}.txt"
        if path.exists():
            try:
                store.keys[kind] = {
                    line for line in path.read_text(encoding="utf-8").splitlines() if line
                }
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
    return store
