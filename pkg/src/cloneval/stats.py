"""Sampling mathematics, vote aggregation, and precision reports."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, asdict
from statistics import NormalDist
from typing import Dict, List, Optional, Sequence

from .errors import IncompleteExperiment, InsufficientPairs, InvalidParameter, NoVotes


@dataclass(frozen=True)
class SamplePlan:
    confidence: float
    margin: float
    population: Optional[int]
    required_n: int
    seed: int


def required_sample_size(
    confidence: float, margin: float, population: Optional[int] = None
) -> int:
    """Cochran's sample size at maximal variance (p = 0.5).

    n0 = ceil(z^2 * 0.25 / margin^2); with a finite population N the
    correction n = ceil(n0 / (1 + (n0 - 1) / N)) applies, capped at N.
    """
    if not (0 < confidence < 1):
        raise InvalidParameter(f"confidence {confidence} outside (0, 1)")
    if not (0 < margin < 1):
        raise InvalidParameter(f"margin {margin} outside (0, 1)")
    if population is not None and population < 1:
        raise InvalidParameter(f"population {population} must be >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    n0 = math.ceil(z * z * 0.25 / (margin * margin))
    if population is None:
        return n0
    n = math.ceil(n0 / (1 + (n0 - 1) / population))
    return min(n, population)


def make_sample_plan(
    confidence: float, margin: float, population: Optional[int], seed: int
) -> SamplePlan:
    return SamplePlan(
        confidence=confidence,
        margin=margin,
        population=population,
        required_n=required_sample_size(confidence, margin, population),
        seed=seed,
    )


def draw_sample(pairs: Sequence, n: int, seed: int, key=None) -> List:
    """Uniform sample without replacement, reproducible for a given seed.

    Pairs are sorted by `key` (their natural sort key by default) before
    drawing so results do not depend on input order or platform.  When
    fewer than n pairs exist an InsufficientPairs is raised carrying the
    shortfall; callers that want "sample everything" catch it.
    """
    ordered = sorted(pairs, key=key)
    if n > len(ordered):
        raise InsufficientPairs(n, len(ordered))
    rng = random.Random(seed)
    return rng.sample(ordered, n)


def aggregate_votes(votes: Sequence[bool]) -> str:
    """'TP' iff strictly more than half the votes are true, else 'FP'."""
    if not votes:
        raise NoVotes("cannot aggregate an empty vote list")
    return "TP" if sum(bool(v) for v in votes) * 2 > len(votes) else "FP"


@dataclass
class PrecisionReport:
    sample_size: int
    auto_counts: Dict[str, int]  # keys: T1, T2, T3, known
    manual_count: int
    tp: int
    fp: int
    precision: float
    effort_reduction: float
    required_n: Optional[int] = None
    oversample_target: Optional[int] = None
    per_pair: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_table(self) -> str:
        lines = [
            f"{'sample size':<22}{self.sample_size}",
            f"{'auto (Type I)':<22}{self.auto_counts.get('T1', 0)}",
            f"{'auto (Type II)':<22}{self.auto_counts.get('T2', 0)}",
            f"{'auto (Type III)':<22}{self.auto_counts.get('T3', 0)}",
            f"{'known (KB)':<22}{self.auto_counts.get('known', 0)}",
            f"{'manual':<22}{self.manual_count}",
            f"{'true positives':<22}{self.tp}",
            f"{'false positives':<22}{self.fp}",
            f"{'precision':<22}{self.precision:.4f}",
            f"{'effort reduction':<22}{self.effort_reduction:.4f}",
        ]
        return "\n".join(lines)


def compute_precision_report(
    resolutions: Sequence, verdicts: Dict, **extra
) -> PrecisionReport:
    """Aggregate per-pair outcomes into a report.

    `resolutions` is a sequence of (key, outcome) where outcome.status is
    one of the pipeline statuses; `verdicts` maps keys of Manual pairs to
    'TP'/'FP'.  Auto-resolved pairs count as true positives (automation
    only ever asserts true positives).
    """
    auto_counts = {"T1": 0, "T2": 0, "T3": 0, "known": 0}
    manual = 0
    tp = 0
    fp = 0
    unresolved = []
    per_pair = []
    for key, outcome in resolutions:
        status = outcome.status
        if status == "AutoType1":
            auto_counts["T1"] += 1
            tp += 1
            verdict = "TP"
        elif status == "AutoType2":
            auto_counts["T2"] += 1
            tp += 1
            verdict = "TP"
        elif status == "AutoType3":
            auto_counts["T3"] += 1
            tp += 1
            verdict = "TP"
        elif status in ("KnownTrue", "KnownFalse"):
            auto_counts["known"] += 1
            if status == "KnownTrue":
                tp += 1
                verdict = "TP"
            else:
                fp += 1
                verdict = "FP"
        elif status == "Manual":
            manual += 1
            verdict = verdicts.get(key)
            if verdict is None:
                unresolved.append(key)
                continue
            if verdict == "TP":
                tp += 1
            else:
                fp += 1
        else:
            unresolved.append(key)
            continue
        per_pair.append(
            {
                "key": str(key),
                "status": status,
                "clone_type": outcome.clone_type,
                "provenance": outcome.provenance,
                "verdict": verdict,
            }
        )
    if unresolved:
        raise IncompleteExperiment(unresolved)
    n = len(per_pair)
    return PrecisionReport(
        sample_size=n,
        auto_counts=auto_counts,
        manual_count=manual,
        tp=tp,
        fp=fp,
        precision=(tp / n) if n else 0.0,
        effort_reduction=(1 - manual / n) if n else 0.0,
        per_pair=per_pair,
        **extra,
    )
