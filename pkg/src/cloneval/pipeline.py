"""Per-pair resolution pipeline.

Order per candidate pair: knowledge-base lookup, Type I hash comparison,
Type II action-token + metrics comparison, Type III action-filter +
classifier, else manual.  The first stage to succeed terminates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .actions import (
    ActionTokenSequence,
    extract_action_tokens,
    overlap_similarity,
    passes_action_filter,
)
from .errors import ClonevalError, ModelUnavailable
from .javasrc.lexer import LITERAL_KINDS, TokenKind, lex, normalize_layout, strip_comments
from .javasrc.methods import MethodRecord
from .javasrc.summary import MethodSummary, parse_method
from .knowledge import KnowledgeSnapshot, PairKey
from .metrics import MetricsVector, compute_metrics, metrics_equal


@dataclass(frozen=True)
class PipelineConfig:
    min_tokens: int = 50
    theta_t3: Fraction = Fraction(9, 10)
    classifier_cutoff: float = 0.5
    trust_similarity_floor: Fraction = Fraction(7, 10)
    vst3_similarity: Fraction = Fraction(9, 10)


@dataclass(frozen=True)
class ResolutionOutcome:
    status: str  # KnownTrue KnownFalse AutoType1 AutoType2 AutoType3 Manual
    clone_type: Optional[str] = None  # T1 T2 VST3 ST3 MT3 WT3_4 T4
    provenance: Optional[str] = None  # knowledge_base algorithm classifier human
    reason: Optional[str] = None  # why a pair fell through to Manual


@dataclass
class CandidatePair:
    left: MethodRecord
    right: MethodRecord
    key: PairKey
    resolution: Optional[ResolutionOutcome] = None

    @staticmethod
    def make(left: MethodRecord, right: MethodRecord) -> "CandidatePair":
        key = PairKey.make(
            (left.file.folder_name, left.file.file_name, left.start_line, left.end_line),
            (right.file.folder_name, right.file.file_name, right.start_line, right.end_line),
        )
        return CandidatePair(left=left, right=right, key=key)


# Method sources repeat across pairs; summarize each distinct source once.
@lru_cache(maxsize=4096)
def _summary_of(source: str) -> MethodSummary:
    from .javasrc.summary import parse_method_source

    return parse_method_source(source)


@lru_cache(maxsize=4096)
def _type1_hash(source: str) -> str:
    normalized = normalize_layout(strip_comments(source))
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def resolve_type1(m1: MethodRecord, m2: MethodRecord) -> bool:
    """SHA-256 equality after comment removal and whitespace removal."""
    return _type1_hash(m1.source) == _type1_hash(m2.source)


def resolve_type2(m1: MethodRecord, m2: MethodRecord) -> bool:
    """Identical ordered action tokens and identical 24-metric vectors."""
    s1 = _summary_of(m1.source)
    s2 = _summary_of(m2.source)
    a1 = extract_action_tokens(s1)
    a2 = extract_action_tokens(s2)
    if a1.ordered != a2.ordered:
        return False
    return metrics_equal(compute_metrics(s1), compute_metrics(s2))


@lru_cache(maxsize=4096)
def _normalized_token_bag(source: str):
    """Language tokens with identifiers blinded and literals kind-abstracted.

    Basis for the syntactic-similarity score that splits VST3 from ST3.
    """
    from collections import Counter

    bag = Counter()
    for t in lex(source):
        if not t.is_significant:
            continue
        if t.kind == TokenKind.IDENTIFIER:
            bag["<id>"] += 1
        elif t.kind in LITERAL_KINDS:
            bag[f"<{t.kind.value}>"] += 1
        else:
            bag[t.lexeme] += 1
    return bag


def syntactic_similarity(m1: MethodRecord, m2: MethodRecord) -> Fraction:
    b1 = _normalized_token_bag(m1.source)
    b2 = _normalized_token_bag(m2.source)
    t1 = sum(b1.values())
    t2 = sum(b2.values())
    bigger = max(t1, t2)
    if bigger == 0:
        return Fraction(0)
    inter = sum(min(f, b2[t]) for t, f in b1.items())
    return Fraction(inter, bigger)


@dataclass(frozen=True)
class Type3Result:
    auto_true: bool
    subcategory: Optional[str] = None  # VST3 | ST3
    probability: Optional[float] = None


def resolve_type3(
    pair: CandidatePair, model, cfg: PipelineConfig
) -> Type3Result:
    """Action-filter gate, then the classifier; gate failure is final."""
    s1 = _summary_of(pair.left.source)
    s2 = _summary_of(pair.right.source)
    a1 = extract_action_tokens(s1)
    a2 = extract_action_tokens(s2)
    if not passes_action_filter(a1, a2, cfg.theta_t3):
        return Type3Result(auto_true=False)
    if model is None:
        return Type3Result(auto_true=False)
    from .classifier import featurize_summaries

    fv = featurize_summaries(pair.key, s1, s2)
    try:
        prob = model.predict(fv)
    except ModelUnavailable:
        return Type3Result(auto_true=False)
    if prob < cfg.classifier_cutoff:
        return Type3Result(auto_true=False, probability=prob)
    sub = (
        "VST3"
        if syntactic_similarity(pair.left, pair.right) >= cfg.vst3_similarity
        else "ST3"
    )
    return Type3Result(auto_true=True, subcategory=sub, probability=prob)


def resolve_pair(
    pair: CandidatePair,
    kb: Optional[KnowledgeSnapshot],
    model,
    cfg: PipelineConfig,
) -> ResolutionOutcome:
    """Run the full stage ladder; every pair terminates."""
    if kb is not None:
        known = kb.lookup(pair.key)
        if known is not None and known.trusted:
            return ResolutionOutcome(
                status="KnownTrue" if known.is_true else "KnownFalse",
                clone_type=known.clone_type,
                provenance="knowledge_base",
            )
    try:
        if resolve_type1(pair.left, pair.right):
            return ResolutionOutcome(
                status="AutoType1", clone_type="T1", provenance="algorithm"
            )
    except ClonevalError as exc:
        return ResolutionOutcome(status="Manual", reason=f"lex error: {exc}")
    try:
        if resolve_type2(pair.left, pair.right):
            return ResolutionOutcome(
                status="AutoType2", clone_type="T2", provenance="algorithm"
            )
        t3 = resolve_type3(pair, model, cfg)
    except ClonevalError as exc:
        return ResolutionOutcome(status="Manual", reason=f"parse error: {exc}")
    if t3.auto_true:
        return ResolutionOutcome(
            status="AutoType3", clone_type=t3.subcategory, provenance="classifier"
        )
    return ResolutionOutcome(status="Manual", reason="unresolved by automation")
