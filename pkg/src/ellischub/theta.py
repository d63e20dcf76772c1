"""Theta kernel: series for the odd theta function and delta, factored
expressions over theta atoms, exact evaluation and identity oracles.

    theta(x) = (x^(1/2) - x^(-1/2)) * prod_{n>=1} (1 - q^n x)(1 - q^n / x)
    delta(a, b) = theta(ab) theta'(1) / (theta(a) theta(b))
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .exactseries import (
    MAX_RESAMPLE,
    ONE,
    EvalPoint,
    HalfMonomial,
    LatticeViolation,
    PoleAtEvaluation,
    QSeries,
    ResampleExhausted,
    UsageError,
    _inv_list,
    _is_zero,
    _mul_lists,
    eval_monomial,
    lazy_points,
    mono,
    rational,
    rational_str,
)

DEFAULT_SEED = 20240001
DEFAULT_ORDER = 4
DEFAULT_POINTS = 3

_KIND_RANK = {"thetaprime": 0, "theta": 1, "delta": 2, "oneminus": 3}


@dataclass(frozen=True)
class Atom:
    """One factor kind: theta(a), theta'(1), delta(a, b) or (1 - a)."""

    kind: str
    a: HalfMonomial = ONE
    b: HalfMonomial = ONE

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise UsageError(f"unknown atom kind {self.kind}")
        if self.kind in ("theta", "delta"):
            self.a.require_integral()
            self.b.require_integral()

    def sort_key(self):
        return (_KIND_RANK[self.kind], self.a.key(), self.b.key())

    def monomials(self) -> Tuple[HalfMonomial, ...]:
        if self.kind == "thetaprime":
            return ()
        if self.kind == "delta":
            return (self.a, self.b)
        return (self.a,)

    def map(self, f: Callable[[HalfMonomial], HalfMonomial]) -> "Atom":
        if self.kind == "thetaprime":
            return self
        if self.kind == "delta":
            return Atom("delta", f(self.a), f(self.b))
        return Atom(self.kind, f(self.a))

    def vanishes(self) -> bool:
        """Identically zero as a function."""
        if self.kind in ("theta", "oneminus"):
            return self.a.is_one()
        if self.kind == "delta":
            return (self.a * self.b).is_one() and not self.a.is_one()
        return False

    def blows_up(self) -> bool:
        """Identically infinite as a function."""
        if self.kind == "delta":
            return (self.a.is_one() or self.b.is_one()) and not (self.a * self.b).is_one()
        return False

    def to_json(self, power: int) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "delta":
            d["a"] = self.a.to_json()
            d["b"] = self.b.to_json()
        elif self.kind != "thetaprime":
            d["arg"] = self.a.to_json()
        d["power"] = power
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> Tuple["Atom", int]:
        kind = d["kind"]
        if kind == "delta":
            atom = cls("delta", HalfMonomial.from_json(d["a"]), HalfMonomial.from_json(d["b"]))
        elif kind == "thetaprime":
            atom = cls("thetaprime")
        else:
            atom = cls(kind, HalfMonomial.from_json(d["arg"]))
        return atom, int(d["power"])

    def __str__(self) -> str:
        if self.kind == "thetaprime":
            return "theta'(1)"
        if self.kind == "delta":
            return f"delta({self.a}, {self.b})"
        if self.kind == "theta":
            return f"theta({self.a})"
        return f"(1 - {self.a})"


THETA_PRIME = Atom("thetaprime")


def _as_mono(m) -> HalfMonomial:
    return mono(m) if isinstance(m, str) else m


Term = Tuple[mpq, Tuple[Tuple[Atom, int], ...]]


def _normalize_term(scalar, factors: Iterable[Tuple[Atom, int]]) -> Optional[Term]:
    scalar = mpq(scalar)
    if scalar == 0:
        return None
    acc: Dict[Atom, int] = {}
    for atom, p in factors:
        acc[atom] = acc.get(atom, 0) + int(p)
    items = [(a, p) for a, p in acc.items() if p]
    zero = any(p > 0 and a.vanishes() or p < 0 and a.blows_up() for a, p in items)
    pole = any(p < 0 and a.vanishes() or p > 0 and a.blows_up() for a, p in items)
    if zero and not pole:
        return None
    items.sort(key=lambda ap: (ap[0].sort_key(), ap[1]))
    return scalar, tuple(items)


class FactoredExpr:
    """Formal sum of scalar multiples of atom products.

    No identities are applied across terms; within a term equal atoms are
    merged and terms that vanish identically (a factor theta(1), say) are
    dropped.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Tuple[object, Iterable[Tuple[Atom, int]]]] = ()):
        out = []
        for scalar, factors in terms:
            t = _normalize_term(scalar, factors)
            if t is not None:
                out.append(t)
        self.terms: Tuple[Term, ...] = tuple(out)

    # constructors
    @classmethod
    def zero(cls) -> "FactoredExpr":
        return cls()

    @classmethod
    def one(cls) -> "FactoredExpr":
        return cls([(1, ())])

    @classmethod
    def constant(cls, c) -> "FactoredExpr":
        return cls([(rational(c) if isinstance(c, str) else c, ())])

    @classmethod
    def of_atom(cls, atom: Atom, power: int = 1) -> "FactoredExpr":
        return cls([(1, ((atom, power),))])

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def atoms(self) -> Iterator[Tuple[Atom, int]]:
        for _, fs in self.terms:
            yield from fs

    def variables(self) -> Tuple[str, ...]:
        vs = set()
        for atom, _ in self.atoms():
            for m in atom.monomials():
                vs.update(m.variables())
        return tuple(sorted(vs))

    def structural_key(self):
        return tuple(sorted((t[0], tuple((a.sort_key(), p) for a, p in t[1])) for t in self.terms))

    # algebra
    def __add__(self, other: "FactoredExpr") -> "FactoredExpr":
        r = FactoredExpr()
        r.terms = self.terms + other.terms
        return r

    def __neg__(self) -> "FactoredExpr":
        r = FactoredExpr()
        r.terms = tuple((-s, f) for s, f in self.terms)
        return r

    def __sub__(self, other: "FactoredExpr") -> "FactoredExpr":
        return self + (-other)

    def scale(self, c) -> "FactoredExpr":
        return FactoredExpr((s * mpq(c), f) for s, f in self.terms)

    def __mul__(self, other) -> "FactoredExpr":
        if not isinstance(other, FactoredExpr):
            return self.scale(other)
        return FactoredExpr((s1 * s2, f1 + f2) for s1, f1 in self.terms for s2, f2 in other.terms)

    __rmul__ = __mul__

    def inverse(self) -> "FactoredExpr":
        if not self.terms:
            raise ZeroDivisionError("division by the zero expression")
        if len(self.terms) != 1:
            raise UsageError("only single-term expressions can be inverted")
        s, fs = self.terms[0]
        return FactoredExpr([(1 / s, tuple((a, -p) for a, p in fs))])

    def __truediv__(self, other) -> "FactoredExpr":
        if not isinstance(other, FactoredExpr):
            return self.scale(1 / mpq(other))
        return self * other.inverse()

    def __pow__(self, k: int) -> "FactoredExpr":
        if k < 0:
            return self.inverse() ** (-k)
        out = FactoredExpr.one()
        for _ in range(k):
            out = out * self
        return out

    def map_monomials(self, f: Callable[[HalfMonomial], HalfMonomial]) -> "FactoredExpr":
        cache: Dict[Atom, Atom] = {}

        def g(a: Atom) -> Atom:
            r = cache.get(a)
            if r is None:
                r = cache[a] = a.map(f)
            return r

        return FactoredExpr((s, tuple((g(a), p) for a, p in fs)) for s, fs in self.terms)

    def substitute(self, mapping: Mapping[str, HalfMonomial]) -> "FactoredExpr":
        return self.map_monomials(lambda m: m.rename(mapping))

    def expand_deltas(self) -> "FactoredExpr":
        out = []
        for s, fs in self.terms:
            new: List[Tuple[Atom, int]] = []
            for a, p in fs:
                if a.kind == "delta":
                    new += [(Atom("theta", a.a * a.b), p), (THETA_PRIME, p),
                            (Atom("theta", a.a), -p), (Atom("theta", a.b), -p)]
                else:
                    new.append((a, p))
            out.append((s, new))
        return FactoredExpr(out)

    # serialization
    def to_json_obj(self) -> dict:
        return {"terms": [{"scalar": rational_str(s), "factors": [a.to_json(p) for a, p in fs]}
                          for s, fs in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FactoredExpr":
        return cls((rational(t["scalar"]), [Atom.from_json(f) for f in t["factors"]]) for t in obj["terms"])

    @classmethod
    def from_json(cls, text: str) -> "FactoredExpr":
        return cls.from_json_obj(json.loads(text))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s, fs in self.terms:
            num = [str(a) if p == 1 else f"{a}^{p}" for a, p in fs if p > 0]
            den = [str(a) if p == -1 else f"{a}^{-p}" for a, p in fs if p < 0]
            body = "*".join(num) if num else "1"
            if den:
                body += " / (" + "*".join(den) + ")"
            if s == 1:
                parts.append(body)
            elif s == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{rational_str(s)}*{body}")
        return " + ".join(parts)

    __repr__ = __str__


# convenience constructors ---------------------------------------------------

def theta(m) -> FactoredExpr:
    return FactoredExpr.of_atom(Atom("theta", _as_mono(m)))


def delta(a, b) -> FactoredExpr:
    return FactoredExpr.of_atom(Atom("delta", _as_mono(a), _as_mono(b)))


def theta_prime() -> FactoredExpr:
    return FactoredExpr.of_atom(THETA_PRIME)


def one_minus(m) -> FactoredExpr:
    return FactoredExpr.of_atom(Atom("oneminus", _as_mono(m)))


def product(exprs: Iterable[FactoredExpr]) -> FactoredExpr:
    out = FactoredExpr.one()
    for e in exprs:
        out = out * e
    return out


def total(exprs: Iterable[FactoredExpr]) -> FactoredExpr:
    out = FactoredExpr.zero()
    for e in exprs:
        out = out + e
    return out


# series ---------------------------------------------------------------------

_TP_CACHE: Dict[int, List] = {}


def _theta_prime_list(order: int) -> List:
    r = _TP_CACHE.get(order)
    if r is None:
        n = order + 1
        r = [mpq(1)] + [mpq(0)] * order
        for k in range(1, n):
            for _ in range(2):
                r = [r[i] - (r[i - k] if i >= k else 0) for i in range(n)]
        _TP_CACHE[order] = r
    return list(r)


def _theta_list(v, r, order: int) -> List:
    """(r - 1/r) * prod (1 - q^k v)(1 - q^k / v) with r*r = v."""
    n = order + 1
    c0 = r - 1 / r
    out = [c0] + [mpq(0)] * order
    if _is_zero(c0):
        return out
    w = v + 1 / v
    for k in range(1, n):
        # multiply by 1 - w q^k + q^(2k)
        new = list(out)
        for i in range(k, n):
            new[i] = new[i] - w * out[i - k]
        for i in range(2 * k, n):
            new[i] = new[i] + out[i - 2 * k]
        out = new
    return out


def theta_series(m: HalfMonomial, p: EvalPoint, order: int) -> QSeries:
    m = _as_mono(m).require_integral()
    return QSeries(_theta_list(eval_monomial(m, p), eval_monomial(m.half(), p), order), order)


def theta_prime_one(order: int) -> QSeries:
    return QSeries(_theta_prime_list(order), order)


def delta_series(a: HalfMonomial, b: HalfMonomial, p: EvalPoint, order: int) -> QSeries:
    return Evaluator(p, order).series(delta(a, b))


class Evaluator:
    """Evaluates expressions at one point and order, caching atom series."""

    def __init__(self, point: EvalPoint, order: int):
        if order < 0:
            raise UsageError("order must be non-negative")
        self.point = point
        self.order = order
        self._mono: Dict[HalfMonomial, object] = {}
        self._theta: Dict[HalfMonomial, List] = {}
        self._pow: Dict[Tuple[Atom, int], List] = {}

    def monomial(self, m: HalfMonomial):
        r = self._mono.get(m)
        if r is None:
            r = self._mono[m] = eval_monomial(m, self.point)
        return r

    def theta(self, m: HalfMonomial) -> List:
        r = self._theta.get(m)
        if r is None:
            r = self._theta[m] = _theta_list(self.monomial(m), self.monomial(m.half()), self.order)
        return r

    def atom(self, atom: Atom) -> List:
        return self.power(atom, 1)

    def power(self, atom: Atom, p: int) -> List:
        key = (atom, p)
        r = self._pow.get(key)
        if r is not None:
            return r
        n = self.order + 1
        if p == 1:
            k = atom.kind
            if k == "theta":
                r = self.theta(atom.a)
            elif k == "thetaprime":
                r = _theta_prime_list(self.order)
            elif k == "oneminus":
                r = [1 - self.monomial(atom.a)] + [mpq(0)] * self.order
            else:
                ta, tb = self.theta(atom.a), self.theta(atom.b)
                if _is_zero(ta[0]) or _is_zero(tb[0]):
                    raise PoleAtEvaluation(f"{atom} at {self.point}")
                r = _mul_lists(self.theta(atom.a * atom.b), _theta_prime_list(self.order), n)
                r = _mul_lists(r, _inv_list(ta, n), n)
                r = _mul_lists(r, _inv_list(tb, n), n)
        elif p == -1:
            r = _inv_list(self.power(atom, 1), n)
        elif p > 1:
            r = _mul_lists(self.power(atom, p - 1), self.power(atom, 1), n)
        else:
            r = _mul_lists(self.power(atom, p + 1), self.power(atom, -1), n)
        self._pow[key] = r
        return r

    def term(self, scalar, factors) -> List:
        n = self.order + 1
        acc = None
        for atom, p in factors:
            s = self.power(atom, p)
            acc = s if acc is None else _mul_lists(acc, s, n)
        if acc is None:
            return [scalar] + [mpq(0)] * self.order
        return [c * scalar for c in acc]

    def values(self, e: FactoredExpr) -> List:
        out = [mpq(0)] * (self.order + 1)
        for s, fs in e.terms:
            t = self.term(s, fs)
            out = [a + b for a, b in zip(out, t)]
        return out

    def series(self, e: FactoredExpr) -> QSeries:
        return QSeries(self.values(e), self.order)


def expr_eval(e: FactoredExpr, p: EvalPoint, order: int) -> QSeries:
    return Evaluator(p, order).series(e)


@dataclass
class Comparison:
    equal: bool
    points_used: int
    point: Optional[EvalPoint] = None
    coefficient: Optional[int] = None
    left: Optional[object] = None
    right: Optional[object] = None

    def detail(self) -> str:
        if self.equal:
            return f"equal at {self.points_used} points"
        return (f"differ at q^{self.coefficient}: {self.left} vs {self.right} "
                f"at point {self.point.assignment() if self.point else None}")


class Checker:
    """Random-point identity testing with shared per-point caches.

    Points are lazily populated from ``seed`` so every expression sees the
    same values for the same variable names.  A point where either side hits
    a pole is skipped for that comparison only.
    """

    def __init__(self, order: int = DEFAULT_ORDER, points: int = DEFAULT_POINTS,
                 seed: int = DEFAULT_SEED, overrides: Optional[Callable[[EvalPoint], EvalPoint]] = None):
        if order < 0 or points < 1:
            raise UsageError("need order >= 0 and points >= 1")
        self.order = order
        self.points = points
        self.seed = seed
        self._overrides = overrides
        self._stream = lazy_points(seed)
        self._evaluators: List[Evaluator] = []

    def evaluator(self, i: int) -> Evaluator:
        while len(self._evaluators) <= i:
            p = next(self._stream)
            if self._overrides is not None:
                p = self._overrides(p)
            self._evaluators.append(Evaluator(p, self.order))
        return self._evaluators[i]

    def compare(self, e1: FactoredExpr, e2: FactoredExpr) -> Comparison:
        good = 0
        poles = 0
        i = 0
        while good < self.points:
            ev = self.evaluator(i)
            i += 1
            try:
                a = ev.values(e1)
                b = ev.values(e2)
            except PoleAtEvaluation:
                poles += 1
                if poles >= MAX_RESAMPLE:
                    raise ResampleExhausted(f"{poles} evaluation points hit poles")
                continue
            poles = 0
            good += 1
            for k, (x, y) in enumerate(zip(a, b)):
                if not _is_zero(x - y):
                    return Comparison(False, good, ev.point, k, x, y)
        return Comparison(True, good)

    def equal(self, e1: FactoredExpr, e2: FactoredExpr) -> bool:
        return self.compare(e1, e2).equal

    def is_zero(self, e: FactoredExpr) -> bool:
        return self.compare(e, FactoredExpr.zero()).equal


def expr_equal(e1: FactoredExpr, e2: FactoredExpr, points: int = DEFAULT_POINTS,
               order: int = DEFAULT_ORDER, seed: int = DEFAULT_SEED) -> bool:
    return Checker(order, points, seed).equal(e1, e2)


# quasi-periodicity ------------------------------------------------------------

def _theta_shift(m: HalfMonomial, v: str):
    d = m.doubled(v)
    if d % 2:
        raise LatticeViolation(f"half power of {v} in {m}: shift v -> qv is not defined")
    r = d // 2
    return (-1) ** (r % 2), m ** (-r), -r * r


def quasi_period_factor(atom: Atom, v: str) -> Tuple[int, HalfMonomial, int]:
    """Factor picked up by ``atom`` (power 1) under v -> q v.

    Returns (sign, multiplier, doubled q-exponent): theta(q^r x) equals
    (-1)^r x^(-r) q^(-r^2/2) theta(x).
    """
    if atom.kind == "thetaprime":
        return 1, ONE, 0
    if atom.kind == "theta":
        return _theta_shift(atom.a, v)
    if atom.kind == "delta":
        s1, m1, q1 = _theta_shift(atom.a * atom.b, v)
        s2, m2, q2 = _theta_shift(atom.a, v)
        s3, m3, q3 = _theta_shift(atom.b, v)
        return s1 * s2 * s3, m1 / m2 / m3, q1 - q2 - q3
    raise UsageError(f"{atom} has no quasi-periodicity")


def expr_quasi_period_factor(e: FactoredExpr, v: str) -> Tuple[int, HalfMonomial, int]:
    """Combined factor of a single-term expression."""
    if len(e.terms) != 1:
        raise UsageError("need a single-term expression")
    sign, mult, qs = 1, ONE, 0
    for atom, p in e.terms[0][1]:
        s, m, q = quasi_period_factor(atom, v)
        if s == -1 and p % 2:
            sign = -sign
        mult = mult * m ** p
        qs += q * p
    return sign, mult, qs


# identity oracles ---------------------------------------------------------------

def fay_residual(a, b, c, d) -> FactoredExpr:
    """LHS - RHS of the trisecant identity in multiplicative variables."""
    a, b, c, d = (_as_mono(x) for x in (a, b, c, d))

    def pair(x, y):
        return theta(x * y) * theta(x / y)

    return pair(a, c) * pair(b, d) - pair(a, b) * pair(c, d) - pair(a, d) * pair(b, c)


def blowup_sides(t1="z1", t2="z2", p1="mu1", p2="mu2") -> Tuple[FactoredExpr, FactoredExpr]:
    """Two fixed-point formulas for the class of C^2 with a two-component divisor.

    ``p_i`` stands for h^(1 - a_i).  The left side is the direct formula,
    the right side sums over the two fixed points of the blow-up.
    """
    t1, t2, p1, p2 = (_as_mono(x) for x in (t1, t2, p1, p2))
    lhs = delta(t1, p1) * delta(t2, p2)
    rhs = delta(t1, p1 * p2) * delta(t2 / t1, p2) + delta(t2, p1 * p2) * delta(t1 / t2, p1)
    return lhs, rhs


def four_term_sides() -> Tuple[FactoredExpr, FactoredExpr]:
    """E_id(X_w0) for GL_3 along the words s2s1s2 and s1s2s1."""
    left = (delta("z3/z2", "mu2/mu1") * delta("z2/z1", "mu3/mu1") * delta("z3/z2", "mu3/mu2")
            + delta("z2/z3", "h") * delta("z3/z1", "mu3/mu1") * delta("z3/z2", "h"))
    right = (delta("z2/z1", "mu3/mu2") * delta("z3/z2", "mu3/mu1") * delta("z2/z1", "mu2/mu1")
             + delta("z1/z2", "h") * delta("z3/z1", "mu3/mu1") * delta("z2/z1", "h"))
    return left, right
