"""Corpus ingestion, CSV parsing, and the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from cloneval.cli import main
from cloneval.corpus import ingest, parse_pairs_csv, size_filter
from cloneval.errors import MalformedCSV
from tests.conftest import build_corpus, pairs_csv_for

LONG_TMPL = """\
public int churn%s(int n, int m) {{
    int acc = 0;
    for (int i = 0; i < n; i++) {{
        acc = acc + mix(i, m);
        acc = acc - part(i);
        acc = acc * blend(m);
    }}
    if (acc > 50) {{
        acc = acc / 2;
    }}
    return acc + n + m;
}}
"""

SHORT = "int tiny(){ return 1; }\n"

DISTINCT = """\
public String weave(String head, String tail, int reps) {
    StringBuilder sb = new StringBuilder();
    for (int i = 0; i < reps; i++) {
        sb.append(head.trim());
        sb.append(tail.toUpperCase());
        sb.append(head.length() + tail.length());
    }
    return sb.toString();
}
"""


def _demo_corpus(tmp_path):
    methods = [LONG_TMPL.format() % c for c in "AB"] + [DISTINCT]
    content = "\n".join(methods) + "\n" + SHORT
    return build_corpus(tmp_path, {"proj/Main.java": content})


def test_ingest_indexes_methods_and_skips_bad_files(tmp_path):
    index = build_corpus(
        tmp_path,
        {"good/A.java": SHORT, "bad/B.java": 'String s = "never closed;'},
    )
    assert ("good", "A.java") in index.methods
    assert ("bad", "B.java") not in index.methods
    assert len(index.diagnostics) == 1


def test_parse_pairs_csv_resolves_rows(tmp_path):
    index = _demo_corpus(tmp_path)
    ms = index.methods[("proj", "Main.java")]
    rows = parse_pairs_csv(pairs_csv_for(ms), index)
    assert len(rows) == 6  # C(4,2)
    assert all(r.pair is not None for r in rows)


def test_parse_pairs_csv_header_optional(tmp_path):
    index = _demo_corpus(tmp_path)
    ms = index.methods[("proj", "Main.java")]
    header = (
        "folder_name_1,file_name_1,start_line_1,end_line_1,"
        "folder_name_2,file_name_2,start_line_2,end_line_2\n"
    )
    rows = parse_pairs_csv(header + pairs_csv_for(ms[:2]), index)
    assert len(rows) == 1


def test_parse_pairs_csv_malformed_reports_line(tmp_path):
    index = _demo_corpus(tmp_path)
    with pytest.raises(MalformedCSV) as ei:
        parse_pairs_csv("a,b,c\n", index)
    assert ei.value.line == 1
    with pytest.raises(MalformedCSV) as ei:
        parse_pairs_csv("p,Main.java,x,9,p,Main.java,1,9\n", index)
    assert "integers" in str(ei.value)


def test_unlocatable_rows_kept_flagged(tmp_path):
    index = _demo_corpus(tmp_path)
    rows = parse_pairs_csv("nope,Z.java,1,9,nope,Z.java,11,19\n", index)
    assert len(rows) == 1
    assert rows[0].pair is None and rows[0].problem


def test_size_filter_drops_small_methods(tmp_path):
    index = _demo_corpus(tmp_path)
    ms = index.methods[("proj", "Main.java")]
    rows = parse_pairs_csv(pairs_csv_for(ms), index)
    kept = size_filter(rows, 50)
    # tiny() is under 50 tokens; its 3 pairs vanish
    assert len(kept) == 3


# -- CLI -------------------------------------------------------------------


@pytest.fixture
def runner():
    return CliRunner()


def _write_pairs(tmp_path, index):
    ms = index.methods[("proj", "Main.java")]
    p = tmp_path / "pairs.csv"
    p.write_text(pairs_csv_for(ms))
    return str(p)


def test_cli_ingest_json_output(tmp_path, runner):
    _demo_corpus(tmp_path)
    result = runner.invoke(main, ["ingest", "--corpus", str(tmp_path / "corpus")])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert "proj/Main.java" in doc["files"]
    assert len(doc["files"]["proj/Main.java"]) == 4


def test_cli_ingest_empty_dir_warns_exit_zero(tmp_path, runner):
    (tmp_path / "empty").mkdir()
    result = runner.invoke(main, ["ingest", "--corpus", str(tmp_path / "empty")])
    assert result.exit_code == 0


def test_cli_resolve_lists_outcomes(tmp_path, runner):
    index = _demo_corpus(tmp_path)
    pairs = _write_pairs(tmp_path, index)
    result = runner.invoke(
        main,
        ["resolve", pairs, "--corpus", str(tmp_path / "corpus"), "--format", "json"],
    )
    assert result.exit_code == 0
    records = json.loads(result.output)
    assert len(records) == 3
    assert {r["status"] for r in records} <= {"AutoType1", "AutoType2", "AutoType3", "Manual"}


def test_cli_resolve_deterministic(tmp_path, runner):
    index = _demo_corpus(tmp_path)
    pairs = _write_pairs(tmp_path, index)
    args = ["resolve", pairs, "--corpus", str(tmp_path / "corpus"), "--format", "json"]
    out1 = runner.invoke(main, args).output
    out2 = runner.invoke(main, args).output
    assert out1 == out2


def test_cli_study_missing_verdicts_exits_one(tmp_path, runner):
    index = _demo_corpus(tmp_path)
    pairs = _write_pairs(tmp_path, index)
    result = runner.invoke(
        main, ["study", pairs, "--corpus", str(tmp_path / "corpus")]
    )
    assert result.exit_code == 1
    assert "missing human verdicts" in result.output


def test_cli_study_with_labels(tmp_path, runner):
    index = _demo_corpus(tmp_path)
    ms = index.methods[("proj", "Main.java")]
    pairs = _write_pairs(tmp_path, index)
    labels = tmp_path / "labels.csv"
    rows = []
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            a, b = ms[i], ms[j]
            rows.append(
                f"proj,Main.java,{a.start_line},{a.end_line},"
                f"proj,Main.java,{b.start_line},{b.end_line},TP"
            )
    labels.write_text("\n".join(rows))
    result = runner.invoke(
        main,
        [
            "study", pairs,
            "--corpus", str(tmp_path / "corpus"),
            "--labels", str(labels),
            "--format", "json",
        ],
    )
    assert result.exit_code == 0, result.output
    rep = json.loads(result.output)
    assert rep["sample_size"] == 3
    assert rep["precision"] == 1.0


def test_cli_bad_pairs_file_exits_one(tmp_path, runner):
    _demo_corpus(tmp_path)
    bad = tmp_path / "bad.csv"
    bad.write_text("one,two\n")
    result = runner.invoke(
        main, ["resolve", str(bad), "--corpus", str(tmp_path / "corpus")]
    )
    assert result.exit_code == 1


def test_cli_import_seed(tmp_path, runner):
    seed = tmp_path / "seed.csv"
    seed.write_text("f,A.java,1,10,f,B.java,1,10,true,T3,0.8\n")
    kb = tmp_path / "kb.sqlite"
    result = runner.invoke(main, ["import-seed", "--kb", str(kb), str(seed)])
    assert result.exit_code == 0
    assert "imported 1" in result.output
