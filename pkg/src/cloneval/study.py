"""Experiment orchestration shared by the HTTP service and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .corpus import CorpusIndex, UploadRow, parse_pairs_csv, size_filter
from .errors import EmptyAfterFilter, InsufficientPairs, MissingVerdict
from .knowledge import KnowledgeSnapshot, PairKey
from .pipeline import PipelineConfig, ResolutionOutcome, resolve_pair
from .stats import PrecisionReport, compute_precision_report, draw_sample, required_sample_size


@dataclass(frozen=True)
class StudyConfig:
    min_tokens: int = 50
    theta_t3: Fraction = Fraction(9, 10)
    classifier_cutoff: float = 0.5
    trust_similarity_floor: Fraction = Fraction(7, 10)
    confidence: float = 0.95
    margin: float = 0.05
    sample_target: int = 400  # oversampling target; the Cochran minimum also applies
    seed: int = 0

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(
            min_tokens=self.min_tokens,
            theta_t3=self.theta_t3,
            classifier_cutoff=self.classifier_cutoff,
            trust_similarity_floor=self.trust_similarity_floor,
        )


def plan_sample(rows: List[UploadRow], cfg: StudyConfig) -> Tuple[List[UploadRow], int]:
    """Sort, size the sample (Cochran minimum, oversample target, capped at
    the population), and draw it reproducibly."""
    population = len(rows)
    if population == 0:
        raise EmptyAfterFilter("no pairs survive the size filter")
    required = required_sample_size(cfg.confidence, cfg.margin, population)
    n = min(max(required, cfg.sample_target), population)
    try:
        sample = draw_sample(rows, n, cfg.seed, key=lambda r: r.key)
    except InsufficientPairs:
        sample = sorted(rows, key=lambda r: r.key)
    return sample, required


def resolve_rows(
    rows: List[UploadRow],
    kb: Optional[KnowledgeSnapshot],
    model,
    cfg: StudyConfig,
) -> List[Tuple[PairKey, ResolutionOutcome]]:
    pcfg = cfg.pipeline()
    out = []
    for row in rows:
        if row.pair is None:
            out.append(
                (row.key, ResolutionOutcome(status="Manual", reason=row.problem))
            )
            continue
        out.append((row.key, resolve_pair(row.pair, kb, model, pcfg)))
    return out


def run_study(
    corpus: CorpusIndex,
    csv_text: str,
    kb: Optional[KnowledgeSnapshot],
    model,
    cfg: StudyConfig,
    verdicts: Optional[Dict[PairKey, str]] = None,
) -> PrecisionReport:
    """Offline end-to-end study: upload, filter, sample, resolve, report.

    `verdicts` supplies human TP/FP decisions for manual pairs; if any
    manual pair lacks one, MissingVerdict names it.
    """
    rows = parse_pairs_csv(csv_text, corpus)
    filtered = size_filter(rows, cfg.min_tokens)
    sample, required = plan_sample(filtered, cfg)
    resolutions = resolve_rows(sample, kb, model, cfg)
    verdicts = verdicts or {}
    missing = [
        key
        for key, outcome in resolutions
        if outcome.status == "Manual" and key not in verdicts
    ]
    if missing:
        raise MissingVerdict(missing)
    return compute_precision_report(
        resolutions,
        verdicts,
        required_n=required,
        oversample_target=cfg.sample_target,
    )
