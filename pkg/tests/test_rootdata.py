from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellischub.exactseries import mono
from ellischub.rootdata import (InvalidDatum, act_on_monomial, bruhat_leq_oracle, build_root_datum,
                               coroot_mu_monomial, line_bundle_char, type_a)


@pytest.mark.parametrize("name,order,top", [("a1", 2, 1), ("a2", 6, 3), ("a3", 24, 6), ("c2", 8, 4)])
def test_group_sizes(name, order, top):
    G = build_root_datum(name).group
    assert len(G) == order
    assert G.longest().length == top
    assert sum(1 for _ in G.reflections()) == len(build_root_datum(name).positive_roots)


@pytest.mark.parametrize("name", ["a2", "a3", "c2"])
def test_bruhat_matches_subword_oracle(name):
    G = build_root_datum(name).group
    oracle = bruhat_leq_oracle(G)
    for w in G:
        for s in G:
            assert G.bruhat_leq(s, w) == (s.key in oracle[w.key])


def test_permutation_convention():
    G = type_a(3).group
    assert G.element((1, 2)).perm() == (2, 3, 1)
    assert G.from_permutation((2, 3, 1)) == G.element((1, 2))
    assert str(G.identity) == "id" and str(G.element((2, 1))) == "s2s1"


def test_c2_cartan_and_coroots():
    d = build_root_datum("c2")
    assert sorted(d.cartan[0][1] * d.cartan[1][0] for _ in [0]) == [2]
    for a in d.positive_roots:
        assert sum(x * y for x, y in zip(a, d.coroot(a))) == 2


def test_unknown_datum():
    with pytest.raises((InvalidDatum, ValueError)):
        build_root_datum("e8")


words = st.lists(st.integers(1, 3), max_size=8)


@given(words)
def test_words_and_inverses(word):
    G = type_a(4).group
    w = G.element(word)
    assert w.length <= len(word) and w.length % 2 == len(word) % 2
    assert (w * w.inverse()).is_identity()
    for r in G.reduced_words(w):
        assert G.element(r) == w and len(r) == w.length


@given(st.lists(st.integers(1, 2), max_size=6))
def test_action_permutes_roots(word):
    d = build_root_datum("c2")
    w = d.group.element(word)
    roots = set(d.positive_roots) | {tuple(-x for x in a) for a in d.positive_roots}
    assert {w.act_weight(a) for a in roots} == roots


def test_monomial_actions():
    d = type_a(3)
    s1 = d.group.s(1)
    assert act_on_monomial(s1, mono("z1/z3"), "z") == mono("z2/z3")
    assert act_on_monomial(s1, mono("mu1"), "mu") == mono("mu2")
    assert line_bundle_char(1, d.group.identity) == mono("z2/z1")
    assert coroot_mu_monomial((1, -1, 0)) == mono("mu2/mu1")
    with pytest.raises(ValueError):
        act_on_monomial(s1, mono("z1*mu1"), "z")
