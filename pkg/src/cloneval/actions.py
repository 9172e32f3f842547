"""Action tokens and the overlap-similarity filter.

An action token is emitted for every method call (callee simple name,
argument list ignored), every accessed field name, and every array access
(the sentinels ArrayAccess / ArrayAccessBinary).  Similarity between two
methods is the multiset-intersection cardinality of their token bags over
the size of the larger bag.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from .errors import InvalidThreshold
from .javasrc.summary import MethodSummary


@dataclass(frozen=True)
class ActionTokenSequence:
    ordered: tuple  # token names in source order
    bag: Counter = field(compare=False, default_factory=Counter)

    @property
    def total(self) -> int:
        return len(self.ordered)

    @staticmethod
    def from_names(names: List[str]) -> "ActionTokenSequence":
        return ActionTokenSequence(ordered=tuple(names), bag=Counter(names))


def extract_action_tokens(s: MethodSummary) -> ActionTokenSequence:
    return ActionTokenSequence.from_names([e.name for e in s.action_events])


def overlap_similarity(a1: ActionTokenSequence, a2: ActionTokenSequence) -> Fraction:
    """Sum of per-token minimum frequencies over the larger total.

    Two empty sequences compare as 0: behavior-free methods carry no
    evidence of similarity and are left to other resolution paths.
    """
    bigger = max(a1.total, a2.total)
    if bigger == 0:
        return Fraction(0)
    inter = sum(min(f, a2.bag[t]) for t, f in a1.bag.items())
    return Fraction(inter, bigger)


def passes_action_filter(a1, a2, theta) -> bool:
    """True iff overlap similarity >= theta (boundary inclusive)."""
    if isinstance(theta, float):
        # via the decimal repr: Fraction(0.9) lands a hair off 9/10, which
        # would break the inclusive boundary
        theta = Fraction(str(theta))
    elif not isinstance(theta, Fraction):
        theta = Fraction(theta)
    if theta < 0 or theta > 1:
        raise InvalidThreshold(f"threshold {theta} outside [0, 1]")
    return overlap_similarity(a1, a2) >= theta
