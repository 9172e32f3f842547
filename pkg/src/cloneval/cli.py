"""Command-line driver: ingestion, resolution, offline studies, dataset
curation, model training, and serving the HTTP API.

Exit codes: 0 success, 1 user error (bad input), 2 internal error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional

import click

from . import classifier
from .corpus import CorpusIndex, ingest, parse_pairs_csv, size_filter
from .errors import ClonevalError
from .knowledge import KnowledgeBase, KnowledgeSnapshot, PairKey
from .pipeline import ResolutionOutcome, resolve_pair
from .study import StudyConfig, plan_sample, resolve_rows, run_study


def _fail_cleanly(fn):
    """Map domain errors to exit 1 and unexpected errors to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ClonevalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except (click.ClickException, click.Abort, SystemExit):
            raise
        except Exception as exc:  # pragma: no cover - defensive
            click.echo(f"internal error: {exc!r}", err=True)
            sys.exit(2)

    return wrapper


def _load_kb(kb_path: Optional[str]) -> Optional[KnowledgeBase]:
    return KnowledgeBase(kb_path) if kb_path else None


def _load_model(model_path: Optional[str]):
    return classifier.ClassifierModel.load(model_path) if model_path else None


def _study_config(**kw) -> StudyConfig:
    return StudyConfig(
        min_tokens=kw["min_tokens"],
        theta_t3=Fraction(str(kw["theta_t3"])),
        confidence=kw["confidence"],
        margin=kw["margin"],
        sample_target=kw["sample_target"],
        seed=kw["seed"],
    )


def _common_options(fn):
    for opt in reversed(
        [
            click.option("--corpus", "corpus_root", required=True, type=click.Path(exists=True, file_okay=False)),
            click.option("--kb", "kb_path", default=None, type=click.Path()),
            click.option("--model", "model_path", default=None, type=click.Path(exists=True, dir_okay=False)),
            click.option("--min-tokens", default=50, show_default=True),
            click.option("--theta-t3", default=0.9, show_default=True),
            click.option("--confidence", default=0.95, show_default=True),
            click.option("--margin", default=0.05, show_default=True),
            click.option("--sample-target", default=400, show_default=True),
            click.option("--seed", default=0, show_default=True),
            click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="table", show_default=True),
            click.option("--jobs", default=1, show_default=True),
        ]
    ):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Semi-automated precision studies for Java method-level clone detectors."""


@main.command("ingest")
@click.option("--corpus", "corpus_root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@_fail_cleanly
def cmd_ingest(corpus_root, out_path):
    """Index every method in the corpus; optionally persist the index."""
    index = ingest(corpus_root)
    doc = {
        "root": index.root,
        "files": {
            f"{folder}/{file}": [
                {
                    "start_line": m.start_line,
                    "end_line": m.end_line,
                    "token_count": m.language_token_count,
                }
                for m in records
            ]
            for (folder, file), records in sorted(index.methods.items())
        },
        "diagnostics": index.diagnostics,
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)
    for diag in index.diagnostics:
        click.echo(f"warning: {diag}", err=True)
    if not index.methods:
        click.echo("warning: no methods found", err=True)


def _kb_snapshot(kb_path, floor) -> Optional[KnowledgeSnapshot]:
    kb = _load_kb(kb_path)
    if kb is None:
        return None
    snap = kb.snapshot(floor)
    kb.close()
    return snap


@main.command("resolve")
@click.argument("pairs_csv", type=click.Path(exists=True, dir_okay=False))
@_common_options
@_fail_cleanly
def cmd_resolve(pairs_csv, corpus_root, kb_path, model_path, fmt, jobs, **kw):
    """Resolve every uploaded pair (after the size filter) and print the
    per-pair outcome listing; no sampling."""
    cfg = _study_config(**kw)
    index = ingest(corpus_root)
    with open(pairs_csv) as fh:
        rows = parse_pairs_csv(fh.read(), index)
    rows = size_filter(rows, cfg.min_tokens)
    snap = _kb_snapshot(kb_path, cfg.trust_similarity_floor)
    model = _load_model(model_path)
    pcfg = cfg.pipeline()

    def one(row):
        if row.pair is None:
            return row.key, ResolutionOutcome(status="Manual", reason=row.problem)
        return row.key, resolve_pair(row.pair, snap, model, pcfg)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one, rows))
    else:
        outcomes = [one(r) for r in rows]

    records = [
        {
            "key": str(key),
            "status": out.status,
            "clone_type": out.clone_type,
            "provenance": out.provenance,
            "reason": out.reason,
        }
        for key, out in outcomes
    ]
    if fmt == "json":
        click.echo(json.dumps(records, indent=2))
    else:
        for rec in records:
            click.echo(
                f"{rec['status']:<10} {rec['clone_type'] or '-':<4} "
                f"{rec['provenance'] or '-':<10} {rec['key']}"
            )
        counts: Dict[str, int] = {}
        for rec in records:
            counts[rec["status"]] = counts.get(rec["status"], 0) + 1
        click.echo("-- " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))


def _read_labels(labels_path: Optional[str]) -> Dict[PairKey, str]:
    """Labels CSV: the 8 endpoint columns plus a 9th column TP/FP."""
    verdicts: Dict[PairKey, str] = {}
    if not labels_path:
        return verdicts
    with open(labels_path) as fh:
        for lineno, cols in enumerate(csv.reader(fh), start=1):
            if not cols:
                continue
            stripped = [c.strip() for c in cols]
            if lineno == 1 and stripped[-1].lower() == "verdict":
                continue
            if len(stripped) != 9 or stripped[8] not in ("TP", "FP"):
                raise ClonevalError(
                    f"labels line {lineno}: need 8 endpoint columns plus TP/FP"
                )
            f1, n1, s1, e1, f2, n2, s2, e2, verdict = stripped
            key = PairKey.make((f1, n1, int(s1), int(e1)), (f2, n2, int(s2), int(e2)))
            verdicts[key] = verdict
    return verdicts


@main.command("study")
@click.argument("pairs_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", "labels_path", default=None, type=click.Path(exists=True, dir_okay=False))
@_common_options
@_fail_cleanly
def cmd_study(pairs_csv, labels_path, corpus_root, kb_path, model_path, fmt, jobs, **kw):
    """Offline precision study: filter, sample, resolve, and report.

    Manual pairs take their verdicts from the labels file."""
    cfg = _study_config(**kw)
    index = ingest(corpus_root)
    with open(pairs_csv) as fh:
        csv_text = fh.read()
    snap = _kb_snapshot(kb_path, cfg.trust_similarity_floor)
    model = _load_model(model_path)
    verdicts = _read_labels(labels_path)
    report = run_study(index, csv_text, snap, model, cfg, verdicts)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(report.to_table())


def _load_tool_pairs(path: str, index: CorpusIndex) -> List:
    with open(path) as fh:
        rows = parse_pairs_csv(fh.read(), index)
    pairs = [r.pair for r in rows if r.pair is not None]
    skipped = len(rows) - len(pairs)
    if skipped:
        click.echo(f"warning: {path}: {skipped} unresolvable rows skipped", err=True)
    return pairs


@main.command("curate")
@click.option("--corpus", "corpus_root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--tool", "tool_csvs", multiple=True, required=True, type=click.Path(exists=True, dir_okay=False), help="Detector output CSV; repeat per tool (at least two).")
@click.option("--union-tool", "union_csvs", multiple=True, type=click.Path(exists=True, dir_okay=False), help="Extra outputs excluded from negatives; defaults to the --tool set.")
@click.option("--theta", default=0.9, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_fail_cleanly
def cmd_curate(corpus_root, tool_csvs, union_csvs, theta, seed, out_path):
    """Build a labeled training set from agreeing detector outputs."""
    if len(tool_csvs) < 2:
        raise click.UsageError(
            "need at least two --tool outputs; the positives are the pairs "
            "every tool agrees on"
        )
    index = ingest(corpus_root)
    tool_outputs = [_load_tool_pairs(p, index) for p in tool_csvs]
    union_outputs = tool_outputs + [_load_tool_pairs(p, index) for p in union_csvs]
    ts = classifier.curate_training_set(
        tool_outputs, union_outputs, index.all_methods, theta=theta, seed=seed
    )
    ts.save(out_path)
    pos = sum(1 for _, y, _ in ts.rows if y == 1)
    click.echo(f"wrote {len(ts)} rows ({pos} positive, {len(ts) - pos} negative) to {out_path}")


@main.command("train")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--kind", type=click.Choice(["logistic", "feedforward"]), default="logistic", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--epochs", default=400, show_default=True)
@click.option("--learning-rate", default=0.5, show_default=True)
@click.option("--holdout", default=0.2, show_default=True)
@_fail_cleanly
def cmd_train(dataset, out_path, kind, seed, epochs, learning_rate, holdout):
    """Train a clone-pair classifier from a curated dataset."""
    ts = classifier.TrainingSet.load(dataset)
    hp = classifier.Hyperparams(
        kind=kind, learning_rate=learning_rate, epochs=epochs, holdout_fraction=holdout
    )
    model = classifier.train(ts, hp, seed=seed)
    model.save(out_path)
    click.echo(
        json.dumps(
            {
                "model": out_path,
                "kind": model.kind,
                "training_fingerprint": model.training_fingerprint,
                "holdout_metrics": model.holdout_metrics,
            },
            indent=2,
        )
    )


@main.command("serve")
@click.option("--corpus", "corpus_root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--kb", "kb_path", default=None, type=click.Path())
@click.option("--model", "model_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--min-tokens", default=50, show_default=True)
@click.option("--theta-t3", default=0.9, show_default=True)
@click.option("--sample-target", default=400, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@_fail_cleanly
def cmd_serve(corpus_root, kb_path, model_path, min_tokens, theta_t3, sample_target, seed, host, port):
    """Run the HTTP study service."""
    import uvicorn

    from .service import create_app

    index = ingest(corpus_root)
    kb = KnowledgeBase(kb_path or ":memory:")
    model = _load_model(model_path)
    cfg = StudyConfig(
        min_tokens=min_tokens,
        theta_t3=Fraction(str(theta_t3)),
        sample_target=sample_target,
        seed=seed,
    )
    app = create_app(index, kb, model, cfg)
    uvicorn.run(app, host=host, port=port)


@main.command("import-seed")
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.argument("seed_csv", type=click.Path(exists=True, dir_okay=False))
@_fail_cleanly
def cmd_import_seed(kb_path, seed_csv):
    """Load curated clone labels into a knowledge base file."""
    kb = KnowledgeBase(kb_path)
    imported, skipped = kb.import_seed(seed_csv)
    kb.close()
    click.echo(f"imported {imported} labels, skipped {skipped} malformed rows")


if __name__ == "__main__":
    main()
