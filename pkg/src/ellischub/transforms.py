"""Quadratic forms recording the quasi-periodicity of theta expressions.

A form is a polynomial of degree at most two in additive variables named
like the multiplicative ones (``z1``, ``mu2``, ``g1``, ``h``).  Shifting a
variable v -> q v multiplies a function with form x^T M x by
(-1)^M_vv * prod_k x_k^(-M_vk) * q^(-M_vv/2).
"""
from __future__ import annotations

from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy
from gmpy2 import mpq

from .ellclasses import schubert_local_bs
from .exactseries import HalfMonomial, UsageError
from .rootdata import RootDatum, WeylElement
from .theta import FactoredExpr, expr_quasi_period_factor

Mono = Tuple[str, ...]


class SummandMismatch(ValueError):
    """Two summands of an expression carry different transformation forms."""

    def __init__(self, first: "QuadraticForm", second: "QuadraticForm"):
        super().__init__(f"summand forms differ: {first} vs {second}")
        self.first = first
        self.second = second


class BranchDisagreement(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _var_key(v: str):
    for p in ("g", "z", "mu", "h"):
        if v.startswith(p) and v[len(p):].isdigit() or v == p == "h":
            return ("gzmh".index(p[0]), int(v[len(p):] or 0))
    return (9, v)


def _mono_key(m) -> Mono:
    return m if len(m) < 2 else tuple(sorted(m, key=_var_key))


class QuadraticForm:
    """Polynomial of degree <= 2 with rational coefficients, as {monomial: coeff}."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Optional[Mapping[Mono, object]] = None):
        self.c: Dict[Mono, mpq] = {}
        for m, v in (coeffs or {}).items():
            v = mpq(v)
            if v:
                key = _mono_key(m)
                v = self.c.get(key, 0) + v
                if v:
                    self.c[key] = v
                else:
                    self.c.pop(key, None)

    @classmethod
    def _raw(cls, c: Dict[Mono, mpq]) -> "QuadraticForm":
        out = cls.__new__(cls)
        out.c = {m: v for m, v in c.items() if v}
        return out

    @classmethod
    def var(cls, name: str) -> "QuadraticForm":
        return cls({(name,): 1})

    @classmethod
    def constant(cls, v) -> "QuadraticForm":
        return cls({(): v})

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        d = dict(self.c)
        for m, v in other.c.items():
            d[m] = d.get(m, 0) + v
        return QuadraticForm._raw(d)

    def __neg__(self) -> "QuadraticForm":
        return QuadraticForm({m: -v for m, v in self.c.items()})

    def __sub__(self, other: "QuadraticForm") -> "QuadraticForm":
        return self + (-other)

    def scale(self, k) -> "QuadraticForm":
        return QuadraticForm({m: v * mpq(k) for m, v in self.c.items()})

    def __mul__(self, other) -> "QuadraticForm":
        if not isinstance(other, QuadraticForm):
            return self.scale(other)
        d: Dict[Mono, mpq] = {}
        for m1, v1 in self.c.items():
            for m2, v2 in other.c.items():
                m = _mono_key(m1 + m2)
                if len(m) > 2:
                    raise UsageError("product exceeds degree two")
                d[m] = d.get(m, 0) + v1 * v2
        return QuadraticForm._raw(d)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadraticForm) and self.c == other.c

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.c.items())))

    def is_zero(self) -> bool:
        return not self.c

    def degree(self) -> int:
        return max((len(m) for m in self.c), default=0)

    def variables(self) -> List[str]:
        return sorted({v for m in self.c for v in m}, key=_var_key)

    def coefficient(self, *mono: str) -> mpq:
        return self.c.get(tuple(sorted(mono, key=_var_key)), mpq(0))

    def matrix_entry(self, a: str, b: str) -> mpq:
        """M_ab of the symmetric matrix with x^T M x equal to the quadratic part."""
        if a == b:
            return self.coefficient(a, a)
        return self.coefficient(a, b) / 2

    def substitute(self, mapping: Mapping[str, "QuadraticForm"]) -> "QuadraticForm":
        acc: Dict[Mono, mpq] = {}
        for m, v in self.c.items():
            parts = [mapping[x].c if x in mapping else {(x,): mpq(1)} for x in m]
            if not parts:
                acc[()] = acc.get((), 0) + v
            elif len(parts) == 1:
                for m1, v1 in parts[0].items():
                    acc[m1] = acc.get(m1, 0) + v * v1
            else:
                for m1, v1 in parts[0].items():
                    for m2, v2 in parts[1].items():
                        key = _mono_key(m1 + m2)
                        if len(key) > 2:
                            raise UsageError("substitution exceeds degree two")
                        acc[key] = acc.get(key, 0) + v * v1 * v2
        return QuadraticForm._raw(acc)

    def depends_on(self, prefix: str) -> bool:
        return any(_var_key(v)[0] == _var_key(prefix + "1")[0] for v in self.variables())

    def to_sympy(self) -> sympy.Expr:
        out = sympy.Integer(0)
        for m, v in self.c.items():
            t = sympy.Rational(int(v.numerator), int(v.denominator))
            for x in m:
                t *= sympy.Symbol(x)
            out += t
        return out

    @classmethod
    def from_sympy(cls, e) -> "QuadraticForm":
        e = sympy.expand(e)
        if e == 0:
            return cls()
        syms = sorted(e.free_symbols, key=lambda s: _var_key(str(s)))
        if not syms:
            return cls.constant(mpq(str(e)))
        poly = sympy.Poly(e, *syms)
        d = {}
        for exps, coeff in poly.terms():
            mono: List[str] = []
            for s, k in zip(syms, exps):
                mono += [str(s)] * k
            if len(mono) > 2:
                raise UsageError("degree exceeds two")
            d[tuple(mono)] = mpq(str(coeff))
        return cls(d)

    def to_json(self) -> List[list]:
        return [[list(m), str(v)] for m, v in sorted(self.c.items(), key=lambda kv: [_var_key(x) for x in kv[0]])]

    def __str__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for m, v in sorted(self.c.items(), key=lambda kv: [_var_key(x) for x in kv[0]]):
            parts.append(f"{v}*{'*'.join(m)}" if m else str(v))
        return " + ".join(parts)

    __repr__ = __str__


LinearForm = QuadraticForm

ZERO = QuadraticForm()
H_FORM = QuadraticForm.var("h")


def linear(vec: Sequence[int], prefix: str) -> QuadraticForm:
    return QuadraticForm({(f"{prefix}{i + 1}",): x for i, x in enumerate(vec) if x})


def z_alpha(root: Sequence[int]) -> QuadraticForm:
    return linear(root, "z")


def mu_alpha(datum: RootDatum, root: Sequence[int]) -> QuadraticForm:
    """The functional mu_alpha = sum_i (alpha^vee)_i mu_i."""
    return linear(datum.coroot(root), "mu")


def monomial_form(m: HalfMonomial) -> QuadraticForm:
    d = {}
    for v, e in m.items():
        if e % 2:
            raise UsageError(f"half-integral exponent in {m}")
        d[(v,)] = e // 2
    return QuadraticForm(d)


def mu_action(w: WeylElement, form: QuadraticForm) -> QuadraticForm:
    """Push every mu-coefficient vector through the coweight action of w."""
    M = w.coweight_matrix
    n = len(M)
    mapping = {f"mu{i + 1}": QuadraticForm({(f"mu{j + 1}",): M[j][i] for j in range(n) if M[j][i]})
               for i in range(n)}
    return form.substitute(mapping)


def reflection_mu_action(datum: RootDatum, root: Sequence[int], form: QuadraticForm) -> QuadraticForm:
    M = datum.coweight_reflection(root)
    n = len(M)
    mapping = {f"mu{i + 1}": QuadraticForm({(f"mu{j + 1}",): M[j][i] for j in range(n) if M[j][i]})
               for i in range(n)}
    return form.substitute(mapping)


def exact_divide(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Quotient f / g for a homogeneous linear g; raises if g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero form")
    if g.degree() != 1 or () in g.c:
        raise UsageError(f"divisor {g} is not homogeneous linear")
    v = g.variables()[0]
    gv = g.coefficient(v)
    rem = dict(f.c)
    quot: Dict[Mono, mpq] = {}
    while True:
        hit = next((m for m in rem if v in m), None)
        if hit is None:
            break
        rest = list(hit)
        rest.remove(v)
        c = rem[hit] / gv
        quot[tuple(rest)] = quot.get(tuple(rest), 0) + c
        for (x,), gx in g.c.items():
            key = tuple(sorted(rest + [x], key=_var_key))
            rem[key] = rem.get(key, 0) - c * gx
            if not rem[key]:
                del rem[key]
    if rem:
        raise ArithmeticError(f"{f} is not divisible by {g}")
    return QuadraticForm(quot)


def divided_difference_form(datum: RootDatum, beta: Sequence[int], M: QuadraticForm) -> QuadraticForm:
    """d_beta(M) = (M - s_beta^mu M) / mu_beta."""
    return exact_divide(M - reflection_mu_action(datum, beta, M), mu_alpha(datum, beta))


# M(omega, sigma) -------------------------------------------------------------------

def _mcache(datum: RootDatum) -> dict:
    return datum.__dict__.setdefault("_m_forms", {})


def m_form_word(datum: RootDatum, word: Sequence[int], sigma: WeylElement) -> QuadraticForm:
    """M(omega, sigma) along the reduced word, comparing branches when both apply."""
    word = tuple(word)
    cache = _mcache(datum)
    key = (word, sigma.key)
    if key in cache:
        return cache[key]
    G = datum.group
    omega = G.element(word)
    if omega.length != len(word):
        raise UsageError(f"{word} is not reduced")
    if not G.bruhat_leq(sigma, omega):
        raise UsageError(f"{sigma} is not below {omega}")
    if not word:
        out = ZERO
    else:
        k = word[-1]
        alpha = datum.simple_root(k)
        sk = G.s(k)
        prev = G.element(word[:-1])
        za = z_alpha(sigma.act_weight(alpha))
        cands = []
        if G.bruhat_leq(sigma, prev):
            cands.append(mu_action(sk, m_form_word(datum, word[:-1], sigma)) + mu_alpha(datum, alpha) * za)
        if G.bruhat_leq(sigma * sk, prev):
            cands.append(mu_action(sk, m_form_word(datum, word[:-1], sigma * sk)) - H_FORM * za)
        if len(cands) == 2 and cands[0] != cands[1]:
            raise BranchDisagreement(f"M({omega}, {sigma}): {cands[0]} vs {cands[1]}")
        out = cands[0]
    cache[key] = out
    return out


def m_form(datum: RootDatum, omega: WeylElement, sigma: WeylElement) -> QuadraticForm:
    return m_form_word(datum, omega.word, sigma)


def center_form(datum: RootDatum, omega: WeylElement) -> QuadraticForm:
    inv = omega.inverse()
    out = ZERO
    for a in datum.positive_roots:
        if not datum.is_positive(inv.act_weight(a)):
            out = out + z_alpha(a)
    return H_FORM * out


# Q(omega) for type A --------------------------------------------------------------

def _v(name: str) -> QuadraticForm:
    return QuadraticForm.var(name)


def q_form(omega: Sequence[int], n: Optional[int] = None) -> QuadraticForm:
    """Transformation form of the modified weight function (gamma, z, mu, h).

    The first sum runs over pairs i < j only; that is what the weight
    function itself carries.
    """
    w = tuple(omega)
    n = len(w) if n is None else n
    h = H_FORM
    g = lambda i: _v(f"g{i}")
    z = lambda i: _v(f"z{i}")
    mu = lambda i: _v(f"mu{i}")
    Q = ZERO
    for i in range(1, n):
        for j in range(i + 1, n):
            if w[i - 1] < w[j - 1]:
                Q = Q + (h * (g(j) - g(i))).scale(2)
        for j in range(1, w[i - 1]):
            Q = Q + (h * (z(j) - g(i))).scale(2)
        P = 1 if w[i - 1] < w[n - 1] else 0
        Q = Q + ((z(w[i - 1]) - g(i)) * (h.scale(P) + mu(n) - mu(i))).scale(2)
        for j in range(1, n + 1):
            Q = Q + (z(j) - g(i)) * (z(j) - g(i))
        for j in range(i + 1, n):
            Q = Q - (g(i) - g(j)) * (g(i) - g(j))
    return Q


def gamma_restriction(sigma: Sequence[int]) -> Dict[str, QuadraticForm]:
    return {f"g{a}": _v(f"z{s}") for a, s in enumerate(sigma, start=1)}


def euler_form(n: int) -> QuadraticForm:
    out = ZERO
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            d = _v(f"z{i}") - _v(f"z{j}")
            out = out + d * d
    return out


# ledger of an expression -------------------------------------------------------------

def term_form(factors) -> QuadraticForm:
    out = ZERO
    for atom, p in factors:
        if atom.kind == "theta":
            lf = monomial_form(atom.a)
            out = out + (lf * lf).scale(p)
        elif atom.kind == "delta":
            out = out + (monomial_form(atom.a) * monomial_form(atom.b)).scale(2 * p)
        elif atom.kind == "oneminus":
            raise UsageError("(1 - x) factors have no elliptic transformation form")
    return out


def form_of_expression(e: FactoredExpr) -> QuadraticForm:
    if e.is_zero():
        raise UsageError("the zero expression has no transformation form")
    forms = [term_form(f) for _, f in e.terms]
    for f in forms[1:]:
        if f != forms[0]:
            raise SummandMismatch(forms[0], f)
    return forms[0]


def predicted_shift(form: QuadraticForm, v: str) -> Tuple[int, HalfMonomial, int]:
    """(sign, multiplier, doubled q-exponent) that the form predicts for v -> q v."""
    mvv = form.matrix_entry(v, v)
    d = {}
    for x in form.variables():
        m = form.matrix_entry(v, x)
        if m:
            if (2 * m).denominator != 1:
                raise UsageError("non-integral matrix entry")
            d[x] = int(-2 * m)
    return (-1) ** int(mvv % 2), HalfMonomial(d), int(-mvv)


# theorem checks -------------------------------------------------------------------------

def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def check_transform_theorems(datum: RootDatum, include_ledger: bool = True) -> List[dict]:
    G = datum.group
    report: List[dict] = []

    def rec(check: str, ok: bool, detail: str = ""):
        report.append({"id": check, "status": _status(ok), "detail": detail})

    pairs = [(w, s) for w in G for s in G if G.bruhat_leq(s, w)]
    roots = list(datum.positive_roots) + [tuple(-x for x in a) for a in datum.positive_roots]
    for w, s in pairs:
        # branch consistency happens inside; path uniqueness over all reduced words
        try:
            forms = {m_form_word(datum, r, s) for r in G.reduced_words(w)}
            rec(f"M path-uniqueness {w},{s}", len(forms) == 1, f"{len(forms)} distinct forms")
        except BranchDisagreement as exc:
            rec(f"M branch-consistency {w},{s}", False, str(exc))
            continue
        M = m_form(datum, w, s)
        for b in roots:
            want = z_alpha(s.act_weight(b)) - z_alpha(w.act_weight(b))
            got = divided_difference_form(datum, b, M)
            rec(f"d_beta M {w},{s},beta={b}", got == want, f"{got} vs {want}")
        for k in range(1, datum.rank + 1):
            wk = w * G.s(k)
            if wk.length == w.length + 1:
                a = datum.simple_root(k)
                want = M + mu_alpha(datum, a) * z_alpha(w.act_weight(a))
                rec(f"simple induction {w},{s},k={k}", m_form(datum, wk, s) == want)
        if include_ledger:
            e = schubert_local_bs(datum, w, s)
            try:
                f = form_of_expression(e)
                rec(f"ledger E = 2M {w},{s}", f == M.scale(2), f"{f} vs 2*({M})")
            except SummandMismatch as exc:
                rec(f"ledger E = 2M {w},{s}", False, str(exc))
            if len(e.terms) >= 1:
                ok = True
                for c, factors in e.terms:
                    single = FactoredExpr([(c, factors)])
                    for v in single.variables():
                        if predicted_shift(M.scale(2), v) != expr_quasi_period_factor(single, v):
                            ok = False
                rec(f"quasi-period {w},{s}", ok)
    for w in G:
        rec(f"center {w}", m_form(datum, w, w) == center_form(datum, w))
    if datum.is_type_a():
        n = datum.ambient_dim
        for w, s in pairs:
            Q = q_form(w.perm(), n).substitute(gamma_restriction(s.perm()))
            want = m_form(datum, w, s).scale(2) + euler_form(n)
            rec(f"Q restricted {w},{s}", Q == want, f"{Q} vs {want}")
    return report


def q_differences_ok(omega: Sequence[int], k: int) -> Tuple[bool, bool]:
    """Both second-difference identities for Q, and their gamma-independence."""
    from .weightfn import perm_compose, perm_inverse, transposition

    w = tuple(omega)
    n = len(w)
    t = transposition(n, k)
    right = q_form(w) - q_form(perm_compose(w, t))
    left = q_form(w) - q_form(perm_compose(t, w))
    inv = perm_inverse(w)
    want_r = ((_v(f"z{w[k - 1]}") - _v(f"z{w[k]}")) * (_v(f"mu{k + 1}") - _v(f"mu{k}"))).scale(2)
    want_l = ((_v(f"z{k}") - _v(f"z{k + 1}")) * (_v(f"mu{inv[k]}") - _v(f"mu{inv[k - 1]}"))).scale(2)
    no_gamma = not right.depends_on("g") and not left.depends_on("g")
    return right == want_r and left == want_l, no_gamma
