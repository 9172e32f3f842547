"""Persistent body of clone knowledge.

Two stores live in one embedded sqlite database: seed labels imported from
an external benchmark-style CSV, and community votes that finalize into
labels once they clear the vote-count and agreement bars.  All mutations
are serialized through one writer lock; readers get consistent snapshots.
"""

from __future__ import annotations

import csv
import json
import sqlite3
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import IllegalCloneType, MalformedRow, UnknownJudge

FINAL_VOTE_COUNT = 10
FINAL_AGREEMENT = Fraction(7, 10)
DEFAULT_TRUST_FLOOR = Fraction(7, 10)

Endpoint = Tuple[str, str, int, int]  # folder, file, start_line, end_line


@dataclass(frozen=True, order=True)
class PairKey:
    left: Endpoint
    right: Endpoint

    @staticmethod
    def make(a: Endpoint, b: Endpoint) -> "PairKey":
        a = (str(a[0]), str(a[1]), int(a[2]), int(a[3]))
        b = (str(b[0]), str(b[1]), int(b[2]), int(b[3]))
        return PairKey(*sorted((a, b)))

    def encode(self) -> str:
        return json.dumps([list(self.left), list(self.right)], separators=(",", ":"))

    @staticmethod
    def decode(text: str) -> "PairKey":
        left, right = json.loads(text)
        return PairKey.make(tuple(left), tuple(right))

    def __str__(self) -> str:
        l, r = self.left, self.right
        return f"{l[0]}/{l[1]}:{l[2]}-{l[3]} <-> {r[0]}/{r[1]}:{r[2]}-{r[3]}"


@dataclass(frozen=True)
class Vote:
    judge_id: str
    is_clone: bool
    clone_type: Optional[str]
    comment: Optional[str]
    timestamp: float


@dataclass(frozen=True)
class KnownLabel:
    key: PairKey
    label: str  # "true_clone" | "false_positive"
    clone_type: Optional[str]
    similarity: Optional[Fraction]
    source: str  # "seed_import" | "community_final"
    vote_count: int = 0
    agreement_ratio: float = 0.0
    trusted: bool = True

    @property
    def is_true(self) -> bool:
        return self.label == "true_clone"


def finalize_check(votes: List[Vote]) -> Optional[KnownLabel]:
    """Final label iff >= 10 unique votes and >= 70% agree on one side."""
    n = len(votes)
    if n < FINAL_VOTE_COUNT:
        return None
    agree_true = sum(1 for v in votes if v.is_clone)
    agree_false = n - agree_true
    top = max(agree_true, agree_false)
    if Fraction(top, n) < FINAL_AGREEMENT:
        return None
    is_true = agree_true >= agree_false  # a tie cannot clear 70%, so moot
    clone_type = None
    if is_true:
        counts: Dict[str, int] = {}
        for v in votes:
            if v.is_clone and v.clone_type:
                counts[v.clone_type] = counts.get(v.clone_type, 0) + 1
        if counts:
            best = max(counts.values())
            modal = [t for t, c in counts.items() if c == best]
            if len(modal) == 1:
                clone_type = modal[0]
    return KnownLabel(
        key=None,  # filled by the store
        label="true_clone" if is_true else "false_positive",
        clone_type=clone_type,
        similarity=None,
        source="community_final",
        vote_count=n,
        agreement_ratio=top / n,
    )


_SCHEMA = """
PRAGMA journal_mode=WAL;
CREATE TABLE IF NOT EXISTS seed_labels (
    key TEXT PRIMARY KEY,
    label TEXT NOT NULL,
    clone_type TEXT,
    similarity TEXT
);
CREATE TABLE IF NOT EXISTS votes (
    key TEXT NOT NULL,
    judge_id TEXT NOT NULL,
    is_clone INTEGER NOT NULL,
    clone_type TEXT,
    comment TEXT,
    ts REAL NOT NULL,
    PRIMARY KEY (key, judge_id)
);
CREATE TABLE IF NOT EXISTS judges (
    judge_id TEXT PRIMARY KEY,
    name TEXT,
    email TEXT
);
"""


class KnowledgeBase:
    """Single-writer, multi-reader store of pair labels and votes."""

    def __init__(self, path: str = ":memory:"):
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock:
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # -- judges -----------------------------------------------------------

    def register_judge(self, judge_id: str, name: str = "", email: str = "") -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO judges VALUES (?,?,?)", (judge_id, name, email)
            )
            self._conn.commit()

    def judge_exists(self, judge_id: str) -> bool:
        cur = self._conn.execute(
            "SELECT 1 FROM judges WHERE judge_id=?", (judge_id,)
        )
        return cur.fetchone() is not None

    # -- votes ------------------------------------------------------------

    def record_judgment(
        self,
        key: PairKey,
        judge_id: str,
        is_clone: bool,
        clone_type: Optional[str] = None,
        comment: Optional[str] = None,
    ) -> List[Vote]:
        if not self.judge_exists(judge_id):
            raise UnknownJudge(judge_id)
        if clone_type == "T1":
            raise IllegalCloneType("Type I pairs are resolved automatically")
        if clone_type is not None and clone_type not in ("T2", "T3", "T4"):
            raise IllegalCloneType(clone_type)
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO votes VALUES (?,?,?,?,?,?)",
                (
                    key.encode(),
                    judge_id,
                    1 if is_clone else 0,
                    clone_type,
                    comment,
                    time.time(),
                ),
            )
            self._conn.commit()
        return self.votes(key)

    def votes(self, key: PairKey) -> List[Vote]:
        cur = self._conn.execute(
            "SELECT judge_id, is_clone, clone_type, comment, ts FROM votes "
            "WHERE key=? ORDER BY judge_id",
            (key.encode(),),
        )
        return [Vote(j, bool(c), t, cm, ts) for j, c, t, cm, ts in cur.fetchall()]

    # -- seed import ------------------------------------------------------

    def import_seed(self, seed_path: str) -> Tuple[int, int]:
        """Load a seed CSV; returns (imported, skipped) row counts.

        Columns: folder_1,file_1,start_1,end_1,folder_2,file_2,start_2,
        end_2,label{true|false},clone_type{T1|T2|T3|T4|},similarity?.
        Type III rows must carry a similarity; duplicate keys keep the
        higher-similarity row.
        """
        imported = skipped = 0
        with open(seed_path, newline="") as fh:
            reader = csv.reader(fh)
            for lineno, row in enumerate(reader, start=1):
                if not row or (lineno == 1 and row[0].strip() == "folder_1"):
                    continue
                try:
                    key, label, clone_type, similarity = _parse_seed_row(row)
                except MalformedRow:
                    skipped += 1
                    continue
                self._upsert_seed(key, label, clone_type, similarity)
                imported += 1
        return imported, skipped

    def _upsert_seed(
        self,
        key: PairKey,
        label: str,
        clone_type: Optional[str],
        similarity: Optional[Fraction],
    ) -> None:
        with self._lock:
            cur = self._conn.execute(
                "SELECT similarity FROM seed_labels WHERE key=?", (key.encode(),)
            )
            row = cur.fetchone()
            if row is not None:
                old = Fraction(row[0]) if row[0] is not None else None
                if old is not None and (similarity is None or similarity <= old):
                    return
            self._conn.execute(
                "INSERT OR REPLACE INTO seed_labels VALUES (?,?,?,?)",
                (
                    key.encode(),
                    label,
                    clone_type,
                    str(similarity) if similarity is not None else None,
                ),
            )
            self._conn.commit()

    # -- lookup -----------------------------------------------------------

    def lookup(
        self, key: PairKey, trust_floor: Fraction = DEFAULT_TRUST_FLOOR
    ) -> Optional[KnownLabel]:
        """Final label for a pair, or None.

        Community labels appear only once finalized.  Imported Type III
        labels below the similarity trust floor are returned with
        trusted=False; the pipeline treats those as unknown.
        """
        votes = self.votes(key)
        final = finalize_check(votes)
        if final is not None:
            return KnownLabel(
                key=key,
                label=final.label,
                clone_type=final.clone_type,
                similarity=None,
                source="community_final",
                vote_count=final.vote_count,
                agreement_ratio=final.agreement_ratio,
            )
        cur = self._conn.execute(
            "SELECT label, clone_type, similarity FROM seed_labels WHERE key=?",
            (key.encode(),),
        )
        row = cur.fetchone()
        if row is None:
            return None
        label, clone_type, sim_text = row
        similarity = Fraction(sim_text) if sim_text is not None else None
        trusted = True
        if clone_type in ("T3", "VST3", "ST3", "MT3", "WT3_4"):
            trusted = similarity is not None and similarity >= trust_floor
        return KnownLabel(
            key=key,
            label=label,
            clone_type=clone_type,
            similarity=similarity,
            source="seed_import",
            trusted=trusted,
        )

    def snapshot(self, trust_floor: Fraction = DEFAULT_TRUST_FLOOR) -> "KnowledgeSnapshot":
        """Read-only view of every currently-final label."""
        labels: Dict[PairKey, KnownLabel] = {}
        for (enc,) in self._conn.execute("SELECT key FROM seed_labels").fetchall():
            key = PairKey.decode(enc)
            labels[key] = self.lookup(key, trust_floor)
        for (enc,) in self._conn.execute(
            "SELECT DISTINCT key FROM votes"
        ).fetchall():
            key = PairKey.decode(enc)
            label = self.lookup(key, trust_floor)
            if label is not None:
                labels[key] = label
        return KnowledgeSnapshot(labels)

    # -- export -----------------------------------------------------------

    def export_labels(self) -> List[dict]:
        out = []
        snap = self.snapshot()
        for key, label in sorted(snap.labels.items()):
            l, r = key.left, key.right
            out.append(
                {
                    "folder_1": l[0],
                    "file_1": l[1],
                    "start_1": l[2],
                    "end_1": l[3],
                    "folder_2": r[0],
                    "file_2": r[1],
                    "start_2": r[2],
                    "end_2": r[3],
                    "label": "true" if label.is_true else "false",
                    "clone_type": label.clone_type or "",
                    "similarity": str(label.similarity)
                    if label.similarity is not None
                    else "",
                    "source": label.source,
                    "vote_count": label.vote_count,
                    "agreement": label.agreement_ratio,
                }
            )
        return out


@dataclass(frozen=True)
class KnowledgeSnapshot:
    labels: Dict[PairKey, KnownLabel]

    def lookup(self, key: PairKey) -> Optional[KnownLabel]:
        return self.labels.get(key)


def _parse_seed_row(row: List[str]) -> Tuple[PairKey, str, Optional[str], Optional[Fraction]]:
    if len(row) < 10:
        raise MalformedRow(f"expected >= 10 columns, got {len(row)}")
    try:
        key = PairKey.make(
            (row[0].strip(), row[1].strip(), int(row[2]), int(row[3])),
            (row[4].strip(), row[5].strip(), int(row[6]), int(row[7])),
        )
    except ValueError as exc:
        raise MalformedRow(str(exc))
    label_text = row[8].strip().lower()
    if label_text not in ("true", "false"):
        raise MalformedRow(f"bad label {row[8]!r}")
    label = "true_clone" if label_text == "true" else "false_positive"
    clone_type = row[9].strip() or None
    if clone_type is not None and clone_type not in (
        "T1",
        "T2",
        "T3",
        "T4",
        "VST3",
        "ST3",
        "MT3",
        "WT3_4",
    ):
        raise MalformedRow(f"bad clone type {row[9]!r}")
    similarity = None
    if len(row) > 10 and row[10].strip():
        try:
            similarity = Fraction(row[10].strip())
        except (ValueError, ZeroDivisionError):
            raise MalformedRow(f"bad similarity {row[10]!r}")
    if clone_type in ("T3", "VST3", "ST3", "MT3", "WT3_4") and similarity is None:
        raise MalformedRow("Type III seed rows must carry a similarity")
    return key, label, clone_type, similarity
