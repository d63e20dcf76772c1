"""Acceptance criteria, one test per criterion.

Each test records (ok, seconds, note) into conftest.ACCEPTANCE; the terminal
summary prints one PASS/FAIL line per criterion.
"""
from __future__ import annotations

import random
import time
from contextlib import contextmanager

import sympy

from conftest import ACCEPTANCE
from ellischub import ellclasses as ec
from ellischub import hecke
from ellischub import transforms as tf
from ellischub import weightfn as wf
from ellischub.exactseries import lazy_points
from ellischub.rootdata import type_a, type_c2
from ellischub.theta import (Checker, Evaluator, blowup_sides, delta, fay_residual,
                             four_term_sides)


@contextmanager
def criterion(number: int, limit: float, note: str = ""):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - t0
        within = secs < limit
        ACCEPTANCE[number] = (ok and within, secs, note + ("" if within else f" (over {limit:.0f}s budget)"))
        print(f"criterion {number}: {'PASS' if ok and within else 'FAIL'} in {secs:.1f}s")
    assert within, f"criterion {number} took {secs:.1f}s (limit {limit}s)"


def fresh(name: str):
    """A new datum with empty caches, so every criterion is timed cold."""
    return type_c2() if name == "c2" else type_a(int(name[1]) + 1)


def _no_failures(records, key="status"):
    bad = [r for r in records if r[key] not in ("pass", "match", "skipped")]
    assert not bad, bad[:3]


def _golden(name: str, order: int):
    golden = ec.load_golden(name)
    d = fresh(golden["group"])
    table = ec.emit_table(d, Checker(order, 3), cross_check=False)
    recs = ec.golden_diff(d, golden, Checker(order, 3), table)
    assert len(recs) == len(d.group) ** 2
    _no_failures(recs)


def test_criterion_01_gl3_golden_table():
    with criterion(1, 10, "36/36 GL3 entries, order 4, 3 points"):
        _golden("gl3", 4)


def test_criterion_02_sp2_golden_table():
    with criterion(2, 60, "64/64 Sp2 entries, order 3, 3 points"):
        _golden("sp2", 3)


def test_criterion_03_route_agreement():
    with criterion(3, 180, "a2, a3, c2 all pairs"):
        for name in ("a2", "a3", "c2"):
            d = fresh(name)
            c = Checker(3, 3)
            for w in d.group:
                for s in d.group:
                    e = ec.schubert_local_bs(d, w, s)
                    assert c.equal(e, ec.schubert_local_rmatrix(d, w, s)), (name, str(w), str(s))
                    assert c.equal(e, ec.schubert_local_pushforward(d, w.word, s)), (name, str(w), str(s))


def test_criterion_04_word_independence():
    with criterion(4, 300, "every reduced word in a3"):
        d = fresh("a3")
        c = Checker(3, 3)
        for w in d.group:
            words = d.group.reduced_words(w)
            for s in d.group:
                first = ec.schubert_local_pushforward(d, words[0], s)
                for other in words[1:]:
                    assert c.equal(first, ec.schubert_local_pushforward(d, other, s)), (str(w), other, str(s))
        assert c.equal(*four_term_sides())


def test_criterion_05_identity_oracles():
    with criterion(5, 5, "order 6, 5 points"):
        c = Checker(6, 5)
        assert c.is_zero(fay_residual("z1", "z2", "z3", "z4"))
        assert c.is_zero(fay_residual("z1*h", "z2/mu1", "mu2", "z3*z4"))
        assert c.equal(*blowup_sides())


def test_criterion_06_hecke_relations():
    with criterion(6, 240, "elliptic a2/c2/a3, degenerate n=3"):
        _no_failures(hecke.verify_relations("elliptic", fresh("a2"), trials=10, seed=1))
        _no_failures(hecke.verify_relations("elliptic", fresh("c2"), trials=10, seed=2))
        a3 = fresh("a3")
        recs = hecke.verify_relations("elliptic", a3, trials=1, seed=3)
        assert any(r["relation"] == "braid 13" for r in recs)
        _no_failures(recs)
        for kind in ("D", "A", "B", "Cq0", "Ctilde"):
            _no_failures(hecke.verify_relations(kind, fresh("a2"), trials=2, seed=4))
        _no_failures(hecke.verify_relations("Cq0", fresh("c2"), trials=1, seed=5))
        h = sympy.Symbol("h")
        m = hecke.ctilde_square_multiplier()
        assert m.free_symbols == {h}
        assert sympy.simplify(m - (1 / h) / (1 - 1 / h) ** 2) == 0


def test_criterion_07_identification():
    with criterion(7, 120, "n=2,3 all pairs; n=4 smoke at order 2"):
        for n, order, omegas in ((2, 3, None), (3, 3, None), (4, 2, "smoke")):
            d = type_a(n)
            c = Checker(order, 3)
            G = d.group
            ws = [G.identity, G.s(1), G.longest()] if omegas else list(G)
            for w in ws:
                W = wf.weight_function(w.perm()).expr
                for s in G:
                    lhs = wf.restrict(W, s.perm())
                    assert c.equal(lhs, ec.schubert_local_bs(d, w, s) * wf.euler_ell(s.perm())), (n, w.perm(), s.perm())


def test_criterion_08_weight_function_recursions():
    with criterion(8, 120, "R-matrix, uniRW, restricted uniBSW; unrestricted uniBSW fails"):
        c = Checker(3, 3)
        for n in (2, 3):
            perms = wf.all_perms(n)
            for w in perms:
                for k in range(1, n):
                    assert c.equal(*wf.rmatrix_sides(w, k, "ww"))
                    assert c.equal(*wf.rmatrix_sides(w, k, "wwh"))
                    assert c.equal(*wf.uniRW_sides(w, k))
                    lhs, rhs = wf.uniBSW_sides(w, k)
                    for s in perms:
                        assert c.equal(wf.restrict(lhs, s), wf.restrict(rhs, s))
        assert not c.equal(*wf.uniBSW_sides((1, 2), 1))


def test_criterion_09_axioms():
    with criterion(9, 120, "GKM, normalization, triangularity for n=3"):
        recs = wf.check_axioms(3, Checker(3, 3))
        _no_failures(recs)
        kinds = {r["id"].split()[0] for r in recs if r["status"] == "pass"}
        assert {"(1.2)", "(2)", "(3.1)"} <= kinds


def test_criterion_10_transformation_calculus():
    with criterion(10, 120, "a1, a2, a3, c2"):
        for name in ("a1", "a2", "a3", "c2"):
            recs = tf.check_transform_theorems(fresh(name))
            _no_failures(recs)
            ids = " ".join(r["id"] for r in recs)
            for key in ("path-uniqueness", "d_beta", "center", "ledger"):
                assert key in ids
            if name in ("a1", "a2"):
                assert "Q restricted" in ids


def test_criterion_11_delta_kernel():
    with criterion(11, 10, "three printed coefficients at 5 points"):
        a, b = sympy.symbols("a b")
        printed = [(1 - 1 / (a * b)) / ((1 - 1 / a) * (1 - 1 / b)),
                   1 / (a * b) - a * b,
                   1 / (a ** 2 * b) + 1 / (a * b ** 2) - a ** 2 * b - a * b ** 2]
        stream = lazy_points(random.Random(11).randint(1, 10 ** 6))
        e = delta("a", "b")
        for _ in range(5):
            p = next(stream)
            got = Evaluator(p, 2).values(e)
            sub = {a: sympy.Rational(str(p.value("a"))), b: sympy.Rational(str(p.value("b")))}
            for k in range(3):
                assert sympy.Rational(str(got[k])) == printed[k].subs(sub)
