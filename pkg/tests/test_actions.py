"""Action tokens and the overlap-similarity filter."""

from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloneval.actions import (
    ActionTokenSequence,
    extract_action_tokens,
    overlap_similarity,
    passes_action_filter,
)
from cloneval.errors import InvalidThreshold
from cloneval.javasrc.summary import parse_method_source


def tokens_of(src):
    return extract_action_tokens(parse_method_source(src))


ENUMERATION_WALK = """\
public Enumeration children() {
    Enumeration allChildren = super.children();
    Vector filtered = new Vector();
    DiligentNode node;
    while (allChildren.hasMoreElements()) {
        node = (DiligentNode) allChildren.nextElement();
        if (!node.isFiltered(true)) filtered.addElement(node);
    }
    return filtered.elements();
}
"""


def test_enumeration_walk_token_order_oracle():
    # calls only; constructor `new Vector()` excluded; source order preserved
    assert tokens_of(ENUMERATION_WALK).ordered == (
        "children",
        "hasMoreElements",
        "nextElement",
        "isFiltered",
        "addElement",
        "elements",
    )


def test_field_access_is_an_action_token():
    seq = tokens_of("int f(){ return obj.field + obj.call(); }")
    assert seq.ordered == ("field", "call")


def test_array_access_sentinels():
    seq = tokens_of("int f(int[] a, int i){ return a[i] + a[i+1]; }")
    assert seq.ordered == ("ArrayAccess", "ArrayAccessBinary")


def test_constructor_calls_excluded():
    seq = tokens_of("void f(){ Foo x = new Foo(); x.run(); }")
    assert seq.ordered == ("run",)


def test_bag_counts_duplicates():
    seq = tokens_of("void f(){ g(); g(); h(); }")
    assert seq.bag == Counter({"g": 2, "h": 1})
    assert seq.total == 3


def brute_force_similarity(b1: Counter, b2: Counter) -> Fraction:
    inter = 0
    for t in set(b1) | set(b2):
        inter += min(b1[t], b2[t])
    bigger = max(sum(b1.values()), sum(b2.values()))
    return Fraction(inter, bigger) if bigger else Fraction(0)


def seq_from_bag(bag: Counter) -> ActionTokenSequence:
    names = [t for t, f in sorted(bag.items()) for _ in range(f)]
    return ActionTokenSequence.from_names(names)


def test_similarity_matches_brute_force_on_1000_random_bags():
    import random

    rnd = random.Random(42)
    alphabet = [f"tok{k}" for k in range(12)]
    for _ in range(1000):
        b1 = Counter({t: rnd.randrange(0, 4) for t in rnd.sample(alphabet, 6)})
        b2 = Counter({t: rnd.randrange(0, 4) for t in rnd.sample(alphabet, 6)})
        b1 = Counter({t: f for t, f in b1.items() if f})
        b2 = Counter({t: f for t, f in b2.items() if f})
        got = overlap_similarity(seq_from_bag(b1), seq_from_bag(b2))
        assert got == brute_force_similarity(b1, b2)


def test_boundary_similarity_equal_theta_passes():
    a = ActionTokenSequence.from_names(["a"] * 9 + ["x"])
    b = ActionTokenSequence.from_names(["a"] * 9 + ["y"])
    assert overlap_similarity(a, b) == Fraction(9, 10)
    assert passes_action_filter(a, b, 0.9)
    assert passes_action_filter(a, b, Fraction(9, 10))
    assert not passes_action_filter(a, b, Fraction(91, 100))


def test_empty_bags_similarity_zero():
    e = ActionTokenSequence.from_names([])
    assert overlap_similarity(e, e) == 0
    assert not passes_action_filter(e, e, 0.9)


def test_invalid_threshold_rejected():
    a = ActionTokenSequence.from_names(["x"])
    with pytest.raises(InvalidThreshold):
        passes_action_filter(a, a, 1.5)
    with pytest.raises(InvalidThreshold):
        passes_action_filter(a, a, -0.1)


bags = st.dictionaries(
    st.sampled_from("abcdefgh"), st.integers(min_value=1, max_value=5), max_size=6
).map(Counter)


@settings(max_examples=200, deadline=None)
@given(bags, bags)
def test_similarity_properties(b1, b2):
    s = overlap_similarity(seq_from_bag(b1), seq_from_bag(b2))
    assert 0 <= s <= 1
    # symmetry
    assert s == overlap_similarity(seq_from_bag(b2), seq_from_bag(b1))
    # exact oracle
    assert s == brute_force_similarity(b1, b2)


@settings(max_examples=100, deadline=None)
@given(bags)
def test_identity_similarity_is_one(b):
    if not b:
        return
    assert overlap_similarity(seq_from_bag(b), seq_from_bag(b)) == 1
