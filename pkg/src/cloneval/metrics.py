"""The 24 method-level software metrics.

Counting rules are fixed by docs/metric-dictionary.md (version below);
classifier features are only comparable across identical dictionary
versions.  All fields derive from integer counts, so vectors compare
exactly, never with a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Tuple

from .javasrc.lexer import TokenKind
from .javasrc.summary import MethodSummary

METRIC_DICTIONARY_VERSION = "cloneval-md-1"

METRIC_NAMES = (
    "XMET",
    "VREF",
    "VDEC",
    "NOS",
    "NOPR",
    "NOA",
    "NEXP",
    "NAND",
    "MDN",
    "LOOP",
    "LMET",
    "HVOC",
    "EXCT",
    "EXCR",
    "CREF",
    "COMP",
    "CAST",
    "NBLTRL",
    "NCLTRL",
    "NSLTRL",
    "NNLTRL",
    "NNULLTRL",
    "HEFF",
    "HDIF",
)


@dataclass(frozen=True)
class MetricsVector:
    XMET: int
    VREF: int
    VDEC: int
    NOS: int
    NOPR: int
    NOA: int
    NEXP: int
    NAND: int
    MDN: int
    LOOP: int
    LMET: int
    HVOC: int
    EXCT: int
    EXCR: int
    CREF: int
    COMP: int
    CAST: int
    NBLTRL: int
    NCLTRL: int
    NSLTRL: int
    NNLTRL: int
    NNULLTRL: int
    HEFF: Fraction
    HDIF: Fraction

    def as_tuple(self) -> Tuple:
        return tuple(getattr(self, n) for n in METRIC_NAMES)

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.as_tuple())


def _count_statement_kinds(statements, kinds) -> int:
    total = 0
    for stmt in statements:
        if stmt.kind in kinds:
            total += 1
        total += _count_statement_kinds(stmt.children, kinds)
    return total


def compute_metrics(s: MethodSummary) -> MetricsVector:
    operators = []
    operands = []
    for e in s.expressions:
        operators.extend(e.operators)
        operands.extend(e.operands)
    operators.extend(s.keyword_operators)

    n1 = len(set(operators))
    n2 = len(set(operands))
    big_n1 = len(operators)
    big_n2 = len(operands)

    hvoc = n1 + n2
    if n2 == 0:
        hdif = Fraction(0)
        heff = Fraction(0)
    else:
        hdif = Fraction(n1, 2) * Fraction(big_n2, n2)
        # volume uses log2(vocabulary); keep it a Fraction via a fixed-point
        # rational of the float so equality between identical counts is exact
        volume = Fraction(big_n1 + big_n2) * Fraction(math.log2(hvoc)).limit_denominator(
            10**9
        )
        heff = hdif * volume

    # branch counts come from the statement tree, not keyword occurrences:
    # a do-while contributes one decision though both `do` and `while` appear
    branch = _count_statement_kinds(s.statements, ("if", "for", "while", "do"))
    comp = 1 + branch + s.case_count + s.catch_count + s.ternary_count

    return MetricsVector(
        XMET=sum(1 for c in s.call_sites if c.receiver == "external"),
        VREF=len(s.referenced_variables),
        VDEC=len(s.declared_variables),
        NOS=s.statement_count,
        NOPR=big_n1,
        NOA=len(s.parameters),
        NEXP=len(s.expressions),
        NAND=big_n2,
        MDN=s.max_nesting,
        LOOP=s.loop_count,
        LMET=sum(1 for c in s.call_sites if c.receiver == "local"),
        HVOC=hvoc,
        EXCT=len(s.thrown_exception_types),
        EXCR=len(set(s.referenced_exception_types)),
        CREF=len(set(s.referenced_classes)),
        COMP=comp,
        CAST=len(s.casts),
        NBLTRL=s.literal_counts[TokenKind.BOOLEAN_LITERAL],
        NCLTRL=s.literal_counts[TokenKind.CHAR_LITERAL],
        NSLTRL=s.literal_counts[TokenKind.STRING_LITERAL],
        NNLTRL=s.literal_counts[TokenKind.INTEGER_LITERAL]
        + s.literal_counts[TokenKind.FLOAT_LITERAL],
        NNULLTRL=s.literal_counts[TokenKind.NULL_LITERAL],
        HEFF=heff,
        HDIF=hdif,
    )


def metrics_equal(a: MetricsVector, b: MetricsVector) -> bool:
    """Exact equality on all 24 fields (rationals compared exactly)."""
    return a.as_tuple() == b.as_tuple()
