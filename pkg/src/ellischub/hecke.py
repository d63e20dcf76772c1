"""Hecke-type operators on W-indexed tuples and a relation verifier.

The elliptic operators act on FactoredExpr components.  The degenerate
families (divided differences D, the CSM operators A, the motivic operators
B and the two q -> 0 limits of C) act on sympy rational functions; identities
between those are decided by exact substitution at random rational points.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .bottsamelson import H
from .ellclasses import kappa, nu, schubert_local_bs
from .exactseries import HalfMonomial, UsageError
from .rootdata import (RootDatum, WeylElement, act_on_mixed, act_on_monomial,
                       coroot_mu_monomial, line_bundle_char, z_monomial)
from .theta import Atom, Checker, FactoredExpr, delta, theta

SORTS = ("elliptic", "ktheory", "cohomology")


@dataclass
class ClassTuple:
    datum: RootDatum
    components: Dict[WeylElement, object]
    sort: str = "elliptic"

    def __post_init__(self):
        if self.sort not in SORTS:
            raise UsageError(f"unknown sort {self.sort}")

    def __getitem__(self, sigma: WeylElement):
        return self.components[sigma]

    def map(self, f: Callable[[object], object]) -> "ClassTuple":
        return ClassTuple(self.datum, {s: f(v) for s, v in self.components.items()}, self.sort)

    @classmethod
    def zero(cls, datum: RootDatum, sort: str = "elliptic") -> "ClassTuple":
        z = FactoredExpr.zero() if sort == "elliptic" else sympy.Integer(0)
        return cls(datum, {s: z for s in datum.group}, sort)


def schubert_tuple(datum: RootDatum, omega: WeylElement) -> ClassTuple:
    return ClassTuple(datum, {s: schubert_local_bs(datum, omega, s) for s in datum.group})


# elliptic operators -------------------------------------------------------------

def _mu(w: WeylElement, e: FactoredExpr) -> FactoredExpr:
    return e.map_monomials(lambda m: act_on_monomial(w, m, "mu"))


def apply_C(k: int, t: ClassTuple) -> ClassTuple:
    if t.sort != "elliptic":
        raise UsageError("C_k acts on elliptic tuples")
    d = t.datum
    sk = d.group.s(k)
    n = nu(d, k)
    out = {}
    for s in d.group:
        L = line_bundle_char(k, s)
        out[s] = delta(L, n) * _mu(sk, t[s]) + delta(L, H) * _mu(sk, t[s * sk])
    return ClassTuple(d, out, "elliptic")


def apply_kappa(k: int, t: ClassTuple) -> ClassTuple:
    m = kappa(nu(t.datum, k))
    return t.map(lambda e: m * e)


def apply_C_word(word: Sequence[int], t: ClassTuple) -> ClassTuple:
    """C_{w1} o ... o C_{wr} applied to t (rightmost first)."""
    for k in reversed(tuple(word)):
        t = apply_C(k, t)
    return t


def apply_Chat(datum: RootDatum, k: int, f: FactoredExpr) -> FactoredExpr:
    """delta(g_{k+1}/g_k, nu_k) s^mu f + delta(g_{k+1}/g_k, h) s^gamma s^mu f."""
    if not datum.is_type_a():
        raise UsageError("the lifted operators are defined for type A only")
    sk = datum.group.s(k)
    L = HalfMonomial({f"g{k + 1}": 2, f"g{k}": -2})
    twisted = f.map_monomials(lambda m: act_on_mixed(sk, m, "mu"))
    swapped = twisted.map_monomials(lambda m: act_on_mixed(sk, m, "gamma"))
    return delta(L, nu(datum, k)) * twisted + delta(L, H) * swapped


def kappa_alpha(datum: RootDatum, k: int) -> FactoredExpr:
    return kappa(nu(datum, k))


# degenerate operators -------------------------------------------------------------

@dataclass(frozen=True)
class DegenerateOp:
    kind: str
    k: int
    alcove: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("D", "A", "B", "Cq0", "Ctilde"):
            raise UsageError(f"unknown operator kind {self.kind}")
        if (self.alcove is not None) != (self.kind == "Ctilde"):
            raise UsageError("an alcove vector is required for Ctilde and only for Ctilde")

    def reflected(self) -> "DegenerateOp":
        """The same operator seen at s_k(lambda): b_k -> -1 - b_k."""
        if self.alcove is None:
            return self
        b = list(self.alcove)
        b[self.k - 1] = -1 - b[self.k - 1]
        return DegenerateOp(self.kind, self.k, tuple(b))


_SORT_OF_KIND = {"D": "cohomology", "A": "cohomology", "B": "ktheory", "Cq0": "ktheory", "Ctilde": "ktheory"}


def sym(name: str) -> sympy.Symbol:
    return sympy.Symbol(name)


def monomial_sympy(m: HalfMonomial) -> sympy.Expr:
    out = sympy.Integer(1)
    for v, e in m.items():
        out *= sym(v) ** sympy.Rational(e, 2)
    return out


def additive_form(vec: Sequence[int]) -> sympy.Expr:
    return sum((x * sym(f"z{i + 1}") for i, x in enumerate(vec)), sympy.Integer(0))


def mu_substitution(w: WeylElement) -> Dict[sympy.Symbol, sympy.Expr]:
    n = len(w.coweight_matrix)
    return {sym(f"mu{i}"): monomial_sympy(act_on_monomial(w, HalfMonomial.var(f"mu{i}"), "mu"))
            for i in range(1, n + 1)}


def _c1(datum: RootDatum, k: int, s: WeylElement) -> sympy.Expr:
    """c_1(L_k) at x_s, additive: -z_{s(alpha_k)}."""
    return -additive_form(s.act_weight(datum.simple_root(k)))


def _Linv(datum: RootDatum, k: int, s: WeylElement) -> sympy.Expr:
    return monomial_sympy(z_monomial(s.act_weight(datum.simple_root(k))))


def apply_degenerate(op: DegenerateOp, t: ClassTuple) -> ClassTuple:
    want = _SORT_OF_KIND[op.kind]
    if t.sort != want:
        raise UsageError(f"{op.kind} acts on {want} tuples, got {t.sort}")
    d = t.datum
    sk = d.group.s(op.k)
    h, y = sym("h"), sym("y")
    out = {}
    if op.kind in ("Cq0", "Ctilde"):
        sub = mu_substitution(sk)
        tw = {s: sympy.sympify(v).xreplace(sub) for s, v in t.components.items()}
        n = monomial_sympy(nu(d, op.k))
    for s in d.group:
        f0, f1 = t[s], t[s * sk]
        if op.kind == "D":
            c = _c1(d, op.k, s)
            out[s] = (f0 + f1) / c
        elif op.kind == "A":
            c = _c1(d, op.k, s)
            out[s] = f0 / c + (1 + c) / c * f1
        elif op.kind == "B":
            L = _Linv(d, op.k, s)
            out[s] = (1 + y) * L / (1 - L) * f0 + (1 + y * L) / (1 - L) * f1
        else:
            L = _Linv(d, op.k, s)
            g0, g1 = tw[s], tw[s * sk]
            internal = (1 - L / h) / ((1 - L) * (1 - 1 / h))
            if op.kind == "Cq0":
                bd = (1 - L / n) / ((1 - L) * (1 - 1 / n))
            else:
                bd = L ** (op.alcove[op.k - 1] + 1) / (1 - L)
            out[s] = bd * g0 + internal * g1
    return ClassTuple(d, out, t.sort)


def cq0_square_multiplier(datum: RootDatum, k: int) -> sympy.Expr:
    h = sym("h")
    n = monomial_sympy(nu(datum, k))
    return ((1 - n / h) / ((1 - n) * (1 - 1 / h))) * ((1 - 1 / (n * h)) / ((1 - 1 / n) * (1 - 1 / h)))


def ctilde_square_multiplier() -> sympy.Expr:
    """-y/(1+y)^2 with y = -1/h."""
    y = -1 / sym("h")
    return -y / (1 + y) ** 2


# rational-function identity testing ---------------------------------------------

def _draw(rng: random.Random) -> sympy.Rational:
    while True:
        a, b = rng.randint(2, 40), rng.randint(2, 40)
        if a != b:
            return sympy.Rational(a, b) ** 2


def rf_equal(e1, e2, trials: int = 3, seed: int = 0) -> bool:
    """Exact equality of rational functions at random positive rational points."""
    e1, e2 = sympy.sympify(e1), sympy.sympify(e2)
    syms = sorted(e1.free_symbols | e2.free_symbols, key=str)
    rng = random.Random(seed)
    done = tries = 0
    while done < trials:
        tries += 1
        if tries > 100 * trials:
            raise RuntimeError("too many poles while sampling")
        pt = {s: _draw(rng) for s in syms}
        try:
            a, b = e1.xreplace(pt), e2.xreplace(pt)
        except ZeroDivisionError:
            continue
        if a.has(sympy.zoo, sympy.nan) or b.has(sympy.zoo, sympy.nan):
            continue
        done += 1
        if sympy.simplify(a - b) != 0:
            return False
    return True


def tuples_equal(a: ClassTuple, b: ClassTuple, checker: Optional[Checker] = None, seed: int = 0) -> bool:
    for s in a.datum.group:
        if a.sort == "elliptic":
            if not (checker or Checker(3, 3)).equal(a[s], b[s]):
                return False
        elif not rf_equal(a[s], b[s], seed=seed):
            return False
    return True


# random tuples -------------------------------------------------------------------

def _rand_vec(rng: random.Random, n: int) -> Tuple[int, ...]:
    while True:
        v = tuple(rng.randint(-1, 1) for _ in range(n))
        if any(v):
            return v


def random_elliptic_tuple(datum: RootDatum, rng: random.Random, terms: int = 2) -> ClassTuple:
    n = datum.ambient_dim
    comps = {}
    for s in datum.group:
        parts = []
        for _ in range(terms):
            zv, zw, mv, mw = (_rand_vec(rng, n) for _ in range(4))
            e = (theta(z_monomial(zv)) * delta(z_monomial(zw), coroot_mu_monomial(mv))
                 / theta(H * coroot_mu_monomial(mw)))
            parts.append(e.scale(rng.randint(1, 5)))
        comps[s] = sum(parts[1:], parts[0])
    return ClassTuple(datum, comps, "elliptic")


def random_rational_tuple(datum: RootDatum, rng: random.Random, sort: str) -> ClassTuple:
    n = datum.ambient_dim
    names = [f"z{i}" for i in range(1, n + 1)]
    if sort == "ktheory":
        names += [f"mu{i}" for i in range(1, n + 1)] + ["h", "y"]
    syms = [sym(v) for v in names]

    def poly():
        return sum((rng.randint(-3, 3) * rng.choice(syms) ** rng.randint(0, 2) for _ in range(3)),
                   sympy.Integer(rng.randint(1, 4)))

    def nonzero():
        while True:
            p = sympy.expand(poly())
            if p != 0:
                return p

    return ClassTuple(datum, {s: poly() / nonzero() for s in datum.group}, sort)


# relation verifier ----------------------------------------------------------------

def braid_order(datum: RootDatum, j: int, k: int) -> int:
    p = datum.cartan[j - 1][k - 1] * datum.cartan[k - 1][j - 1]
    return {0: 2, 1: 3, 2: 4, 3: 6}[p]


def braid_words(datum: RootDatum, j: int, k: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    m = braid_order(datum, j, k)
    return (tuple(j if i % 2 == 0 else k for i in range(m)),
            tuple(k if i % 2 == 0 else j for i in range(m)))


def _apply_deg_word(kind: str, word: Sequence[int], t: ClassTuple) -> ClassTuple:
    for k in reversed(tuple(word)):
        t = apply_degenerate(DegenerateOp(kind, k), t)
    return t


def verify_relations(kind: str, datum: RootDatum, trials: int = 3, seed: int = 0,
                     checker: Optional[Checker] = None) -> List[dict]:
    """Square and braid relations on random tuples; one record per check."""
    rng = random.Random(f"{seed}:{kind}:{datum.name}")
    checker = checker or Checker(3, 3, seed=seed or 20240001)
    r = datum.rank
    report = []

    def record(rel: str, trial: int, ok: bool):
        report.append({"relation": rel, "datum": datum.name, "trial_seed": f"{seed}:{trial}",
                       "status": "pass" if ok else "fail"})

    for trial in range(trials):
        if kind == "elliptic":
            t = random_elliptic_tuple(datum, rng)
            for k in range(1, r + 1):
                record(f"C{k}^2=kappa{k}", trial,
                       tuples_equal(apply_C_word((k, k), t), apply_kappa(k, t), checker))
            for j in range(1, r + 1):
                for k in range(j + 1, r + 1):
                    w1, w2 = braid_words(datum, j, k)
                    record("braid " + "".join(map(str, w1)), trial,
                           tuples_equal(apply_C_word(w1, t), apply_C_word(w2, t), checker))
        elif kind in ("D", "A", "B"):
            sort = _SORT_OF_KIND[kind]
            t = random_rational_tuple(datum, rng, sort)
            y = sym("y")
            for k in range(1, r + 1):
                once = _apply_deg_word(kind, (k,), t)
                twice = _apply_deg_word(kind, (k, k), t)
                if kind == "D":
                    rel, want = f"D{k}^2=0", ClassTuple.zero(datum, sort)
                elif kind == "A":
                    rel, want = f"A{k}^2=id", t
                else:
                    rel = f"(B{k}+y)(B{k}+1)=0"
                    want = ClassTuple(datum, {s: -(y + 1) * once[s] - y * t[s] for s in datum.group}, sort)
                record(rel, trial, tuples_equal(twice, want, seed=seed + trial))
            for j in range(1, r + 1):
                for k in range(j + 1, r + 1):
                    w1, w2 = braid_words(datum, j, k)
                    record(f"{kind} braid " + "".join(map(str, w1)), trial,
                           tuples_equal(_apply_deg_word(kind, w1, t), _apply_deg_word(kind, w2, t), seed=seed + trial))
        elif kind == "Cq0":
            t = random_rational_tuple(datum, rng, "ktheory")
            for k in range(1, r + 1):
                op = DegenerateOp("Cq0", k)
                twice = apply_degenerate(op, apply_degenerate(op, t))
                m = cq0_square_multiplier(datum, k)
                record(f"Cq0_{k}^2", trial, tuples_equal(twice, t.map(lambda e: m * e), seed=seed + trial))
        elif kind == "Ctilde":
            t = random_rational_tuple(datum, rng, "ktheory")
            m = ctilde_square_multiplier()
            for k in range(1, r + 1):
                for b in (-2, -1, 0, 1, 2):
                    alc = tuple(b if i == k - 1 else 0 for i in range(r))
                    op = DegenerateOp("Ctilde", k, alc)
                    twice = apply_degenerate(op, apply_degenerate(op.reflected(), t))
                    record(f"Ctilde_{k}^2 b={b}", trial,
                           tuples_equal(twice, t.map(lambda e: m * e), seed=seed + trial))
        else:
            raise UsageError(f"unknown relation family {kind}")
    return report


# bridging q^0 coefficients -----------------------------------------------------------

def to_sympy(e: FactoredExpr) -> sympy.Expr:
    """Exact value of a q-independent expression (scalars and oneminus atoms only)."""
    out = sympy.Integer(0)
    for c, factors in e.terms:
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for atom, p in factors:
            if atom.kind != "oneminus":
                raise UsageError(f"{atom.kind} atoms depend on q")
            term *= (1 - monomial_sympy(atom.a)) ** p
        out += term
    return out


def q_zero_value(e: FactoredExpr) -> sympy.Expr:
    """q^0 coefficient of an expression as a rational function."""
    out = sympy.Integer(0)
    for c, factors in e.terms:
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for atom, p in factors:
            if atom.kind == "theta":
                x = monomial_sympy(atom.a.half())
                v = x - 1 / x
            elif atom.kind == "thetaprime":
                v = sympy.Integer(1)
            elif atom.kind == "oneminus":
                v = 1 - monomial_sympy(atom.a)
            else:
                a, b = monomial_sympy(atom.a), monomial_sympy(atom.b)
                v = (1 - 1 / (a * b)) / ((1 - 1 / a) * (1 - 1 / b))
            term *= v ** p
        out += term
    return out


def q_zero_tuple(t: ClassTuple) -> ClassTuple:
    return ClassTuple(t.datum, {s: q_zero_value(v) for s, v in t.components.items()}, "ktheory")


def verify_limit_consistency(datum: RootDatum, seed: int = 0) -> List[dict]:
    """q^0 part of C_k E(X_omega) against Cq0_k applied to the q^0 tuple."""
    report = []
    for om in datum.group:
        t = schubert_tuple(datum, om)
        base = q_zero_tuple(t)
        for k in range(1, datum.rank + 1):
            lhs = q_zero_tuple(apply_C(k, t))
            rhs = apply_degenerate(DegenerateOp("Cq0", k), base)
            report.append({"relation": f"q0(C{k} E[{om}]) = Cq0_{k}", "datum": datum.name,
                           "trial_seed": str(seed),
                           "status": "pass" if tuples_equal(lhs, rhs, seed=seed) else "fail"})
    return report
