"""Corpus ingestion and CSV resolution.

Corpus layout on disk: <corpus_root>/<folder_name>/<file_name> with a
.java suffix.  Ingestion extracts every method up front; uploaded CSV
rows are resolved against those spans with the line-overlap rule.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import (
    ClonevalError,
    FileNotFound,
    MalformedCSV,
    NoMatchingMethod,
)
from .javasrc.lexer import KEYWORDS  # noqa: F401  (re-export convenience)
from .javasrc.methods import MethodRecord, SourceFile, extract_methods, locate_method
from .knowledge import PairKey
from .pipeline import CandidatePair


@dataclass
class CorpusIndex:
    root: str
    methods: Dict[Tuple[str, str], List[MethodRecord]] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)

    def locate(self, folder: str, file: str, start: int, end: int) -> MethodRecord:
        key = (folder, file)
        if key not in self.methods:
            raise FileNotFound(f"{folder}/{file} not in corpus")
        return locate_method(self.methods[key], start, end)

    @property
    def all_methods(self) -> List[MethodRecord]:
        out = []
        for key in sorted(self.methods):
            out.extend(self.methods[key])
        return out


def ingest(corpus_root: str, manifest: Optional[Iterable[Tuple[str, str]]] = None) -> CorpusIndex:
    """Extract methods from every .java file under the corpus root.

    Files that fail to lex or parse are skipped with a diagnostic; their
    pairs will surface later as manual with a lookup failure.
    """
    index = CorpusIndex(root=corpus_root)
    if manifest is not None:
        wanted = list(manifest)
    else:
        wanted = []
        for folder in sorted(os.listdir(corpus_root)):
            fpath = os.path.join(corpus_root, folder)
            if not os.path.isdir(fpath):
                continue
            for name in sorted(os.listdir(fpath)):
                if name.endswith(".java"):
                    wanted.append((folder, name))
    for folder, name in wanted:
        path = os.path.join(corpus_root, folder, name)
        try:
            with open(path, encoding="utf-8") as fh:
                content = fh.read()
            sf = SourceFile(corpus_root, folder, name, content)
            index.methods[(folder, name)] = extract_methods(sf)
        except (OSError, UnicodeDecodeError, ClonevalError) as exc:
            index.diagnostics.append(f"{folder}/{name}: {exc}")
    return index


@dataclass
class UploadRow:
    """One CSV row, resolved or not; unresolvable rows go to manual."""

    key: PairKey
    pair: Optional[CandidatePair]
    problem: Optional[str] = None


_HEADER = [
    "folder_name_1",
    "file_name_1",
    "start_line_1",
    "end_line_1",
    "folder_name_2",
    "file_name_2",
    "start_line_2",
    "end_line_2",
]


def parse_pairs_csv(text: str, corpus: CorpusIndex) -> List[UploadRow]:
    """Parse the 8-column upload format and resolve rows to methods.

    Header row optional.  A malformed row aborts with its line number; a
    row whose methods cannot be located stays in the result flagged with
    the problem (sample integrity: nothing is silently dropped).
    """
    rows: List[UploadRow] = []
    reader = csv.reader(io.StringIO(text))
    for lineno, cols in enumerate(reader, start=1):
        if not cols:
            continue
        if lineno == 1 and [c.strip() for c in cols] == _HEADER:
            continue
        if len(cols) != 8:
            raise MalformedCSV(f"expected 8 columns, got {len(cols)}", lineno)
        try:
            f1, n1, s1, e1, f2, n2, s2, e2 = [c.strip() for c in cols]
            span1 = (f1, n1, int(s1), int(e1))
            span2 = (f2, n2, int(s2), int(e2))
        except ValueError:
            raise MalformedCSV("line numbers must be integers", lineno)
        key = PairKey.make(span1, span2)
        try:
            m1 = corpus.locate(f1, n1, int(s1), int(e1))
            m2 = corpus.locate(f2, n2, int(s2), int(e2))
        except (FileNotFound, NoMatchingMethod) as exc:
            rows.append(UploadRow(key=key, pair=None, problem=str(exc)))
            continue
        rows.append(UploadRow(key=key, pair=CandidatePair.make(m1, m2)))
    return rows


def size_filter(rows: List[UploadRow], min_tokens: int) -> List[UploadRow]:
    """Drop pairs where either method is below the token floor.

    Unresolvable rows pass through: they cannot be measured, and they must
    reach a terminal outcome (manual) rather than vanish.
    """
    kept = []
    for row in rows:
        if row.pair is None:
            kept.append(row)
            continue
        if (
            row.pair.left.language_token_count >= min_tokens
            and row.pair.right.language_token_count >= min_tokens
        ):
            kept.append(row)
    return kept
