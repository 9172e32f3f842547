"""Metric vectors: hand-count oracles, invariances, exact equality."""

import random
import re
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloneval.javasrc.summary import parse_method_source
from cloneval.metrics import (
    METRIC_DICTIONARY_VERSION,
    METRIC_NAMES,
    compute_metrics,
    metrics_equal,
)


def mv(src):
    return compute_metrics(parse_method_source(src))


def test_metric_names_are_the_canonical_24():
    assert len(METRIC_NAMES) == 24
    assert set(METRIC_NAMES) == {
        "XMET", "VREF", "VDEC", "NOS", "NOPR", "NOA", "NEXP", "NAND", "MDN",
        "LOOP", "LMET", "HVOC", "EXCT", "EXCR", "CREF", "COMP", "CAST",
        "NBLTRL", "NCLTRL", "NSLTRL", "NNLTRL", "NNULLTRL", "HEFF", "HDIF",
    }
    assert METRIC_DICTIONARY_VERSION == "cloneval-md-1"


def test_empty_method_all_zero_except_comp():
    v = mv("void f(){}")
    for name in METRIC_NAMES:
        value = getattr(v, name)
        if name == "COMP":
            assert value == 1
        else:
            assert value == 0


def test_add_method_oracle():
    v = mv("int add(int a,int b){return a+b;}")
    assert v.NOA == 2
    assert v.NOS == 1
    assert v.LOOP == 0
    assert v.NAND >= 2
    assert v.COMP == 1
    assert v.VREF == 2  # a and b referenced once each
    assert v.MDN == 0


def test_loop_method_oracle():
    v = mv("int h(int n){int s=0; for(int i=0;i<n;i++){ if(i>2) s+=i; } return s;}")
    assert v.LOOP == 1
    assert v.MDN == 2  # s+=i inside if inside for
    assert v.COMP == 3  # 1 + for + if
    assert v.VDEC == 2  # s and i
    assert v.NOS == 5  # decl, for, if, s+=i, return


def test_literal_counters_by_kind():
    v = mv(
        "void f(){ boolean b = true; char c = 'x'; String s = \"hi\"; "
        "int i = 3; double d = 2.5; Object o = null; }"
    )
    assert v.NBLTRL == 1
    assert v.NCLTRL == 1
    assert v.NSLTRL == 1
    assert v.NNLTRL == 2  # integer and float combined
    assert v.NNULLTRL == 1


def test_call_receiver_split_local_vs_external():
    v = mv("void f(){ helper(); this.helper(); obj.run(); a.b.c(); }")
    assert v.LMET == 2  # bare + this.
    assert v.XMET == 2  # obj.run and a.b.c


def test_exception_metrics():
    v = mv(
        "void f() throws java.io.IOException {"
        " try { g(); } catch (RuntimeException e) { }"
        " throw new IllegalStateException(); }"
    )
    assert v.EXCT == 2  # throws clause type + thrown new type
    assert v.EXCR == 2  # distinct: IOException-ish + RuntimeException


def test_cast_counted():
    v = mv("void f(Object o){ String s = (String) o; int i = (int) 1L; }")
    assert v.CAST == 2


def test_comp_counts_all_branch_kinds():
    v = mv(
        "int f(int x){ if (x>0) x--; for(;;){ break; } while(x>0) x--; "
        "do { x--; } while (x>0); switch(x){ case 1: break; case 2: break; } "
        "try { g(); } catch (Exception e) { } int y = x>0 ? 1 : 2; return y; }"
    )
    # 1 + if + for + while + do + 2 cases + catch + ternary
    assert v.COMP == 1 + 1 + 1 + 1 + 1 + 2 + 1 + 1


def test_halstead_identities():
    v = mv("int add(int a,int b){return a+b;}")
    assert isinstance(v.HDIF, Fraction) and isinstance(v.HEFF, Fraction)
    assert v.HVOC > 0
    assert v.HDIF > 0
    assert v.HEFF > 0


def test_halstead_zero_when_no_operands():
    v = mv("void f(){}")
    assert v.HDIF == 0 and v.HEFF == 0


def test_metrics_equal_is_exact():
    a = mv("int add(int a,int b){return a+b;}")
    b = mv("int add(int a,int b){return a+b;}")
    c = mv('int add(int a,int b){String s = "x"; return a+b;}')
    assert metrics_equal(a, b)
    assert not metrics_equal(a, c)


LOOP_SRC = """\
int total(int[] xs, int bias) {
    int sum = 0;
    for (int i = 0; i < xs.length; i++) {
        if (xs[i] > bias) {
            sum = sum + xs[i];
        }
    }
    return sum + bias;
}
"""


def _rename(src, mapping, literals=None):
    out = re.sub(
        r"\b[a-zA-Z_][a-zA-Z0-9_]*\b",
        lambda m: mapping.get(m.group(0), m.group(0)),
        src,
    )
    for old, new in (literals or {}).items():
        out = out.replace(old, new)
    return out


def test_rename_invariance_hand_case():
    renamed = _rename(
        LOOP_SRC,
        {"total": "aggregate", "xs": "data", "bias": "floor", "sum": "acc", "i": "k"},
        literals={"0": "7"},
    )
    assert metrics_equal(mv(LOOP_SRC), mv(renamed))


def test_layout_and_comment_invariance():
    reformatted = (
        "int total(int[] xs, int bias) { /* c */ int sum = 0;"
        " for (int i = 0; i < xs.length; i++) { if (xs[i] > bias) {"
        " sum = sum + xs[i]; } } // done\n return sum + bias; }"
    )
    assert metrics_equal(mv(LOOP_SRC), mv(reformatted))


_names = ["alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "theta"]


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_rename_invariance_property(rnd):
    picks = rnd.sample(_names, 5)
    mapping = dict(zip(["total", "xs", "bias", "sum", "i"], picks))
    lit = str(rnd.randrange(1, 999))
    renamed = _rename(LOOP_SRC, mapping, literals={"0": lit})
    assert metrics_equal(mv(LOOP_SRC), mv(renamed))


def test_appending_statement_never_decreases_nos():
    base = "void f(){ a(); b(); }"
    more = "void f(){ a(); b(); c(); }"
    assert mv(more).NOS >= mv(base).NOS
