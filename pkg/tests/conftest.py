"""Shared fixtures: in-memory method builders and on-disk corpus builders."""

from __future__ import annotations

import os

import pytest

from cloneval.corpus import CorpusIndex, ingest
from cloneval.javasrc.methods import (
    MethodRecord,
    SourceFile,
    extract_methods,
    language_token_count,
)


def make_method(
    source: str,
    folder: str = "p",
    file: str = "F.java",
    start: int = 1,
) -> MethodRecord:
    """Wrap a standalone method body in a MethodRecord without disk I/O."""
    sf = SourceFile("mem", folder, file, source)
    end = start + source.count("\n")
    if not source.endswith("\n"):
        end += 0
    return MethodRecord(
        file=sf,
        start_line=start,
        end_line=max(start, start + source.rstrip("\n").count("\n")),
        source=source,
        language_token_count=language_token_count(source),
    )


def build_corpus(tmp_path, files: dict) -> CorpusIndex:
    """files: {folder/name.java: content} written under tmp_path/corpus."""
    root = tmp_path / "corpus"
    for rel, content in files.items():
        folder, name = rel.split("/", 1)
        d = root / folder
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(content)
    return ingest(str(root))


def methods_of(index: CorpusIndex, folder: str, name: str):
    return index.methods[(folder, name)]


def pairs_csv_for(methods) -> str:
    """All unordered pairs among the given records, in upload format."""
    rows = []
    for i in range(len(methods)):
        for j in range(i + 1, len(methods)):
            a, b = methods[i], methods[j]
            rows.append(
                f"{a.file.folder_name},{a.file.file_name},{a.start_line},{a.end_line},"
                f"{b.file.folder_name},{b.file.file_name},{b.start_line},{b.end_line}"
            )
    return "\n".join(rows)


@pytest.fixture
def mk():
    return make_method
