"""Exact arithmetic kernel: rationals, half-integer Laurent monomials,
truncated q-series and evaluation points.

Every variable of an evaluation point is assigned the square of a positive
rational ``s``; a monomial with doubled exponent ``e`` then evaluates to
``s**e``, so half powers stay rational.
"""
from __future__ import annotations

import random
import re
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

Rational = mpq

MAX_RESAMPLE = 100


class UsageError(ValueError):
    """Bad input to a public operation."""


class LatticeViolation(ValueError):
    """An odd doubled exponent appeared where the integer lattice is required."""


class PoleAtEvaluation(ArithmeticError):
    """The evaluation point hit a zero of a denominator."""


class ResampleExhausted(RuntimeError):
    """Too many consecutive evaluation points landed on poles."""


def rational(x) -> mpq:
    """Coerce ints, strings like '3/4', Fractions and mpq to mpq."""
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            p, q = x.split("/")
            return mpq(int(p), int(q))
        return mpq(int(x))
    return mpq(x)


def rational_str(x: mpq) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# monomials

_TOKEN = re.compile(r"\s*([*/])?\s*([A-Za-z][A-Za-z0-9_]*|1)(?:\^(\(?-?\d+(?:/2)?\)?))?")


class HalfMonomial:
    """Laurent monomial with exponents in (1/2)Z, stored doubled.

    >>> m = HalfMonomial.parse("h*mu2/mu1")
    >>> m.doubled("mu1")
    -2
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, doubled: Optional[Mapping[str, int]] = None):
        items = []
        if doubled:
            for v, e in doubled.items():
                e = int(e)
                if e:
                    items.append((v, e))
        items.sort()
        self._items: Tuple[Tuple[str, int], ...] = tuple(items)
        self._hash = hash(self._items)

    @classmethod
    def from_exponents(cls, exps: Mapping[str, int]) -> "HalfMonomial":
        return cls({v: 2 * int(e) for v, e in exps.items()})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "HalfMonomial":
        return cls({name: 2 * power})

    @classmethod
    def parse(cls, text: str) -> "HalfMonomial":
        """Parse products like ``z2/z1``, ``h*mu2^-1``, ``z2^-2``, ``h^1/2``, ``1``."""
        text = text.replace(" ", "")
        out: Dict[str, int] = {}
        pos = 0
        first = True
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise UsageError(f"cannot parse monomial {text!r}")
            op, name, exp = m.groups()
            if op is None and not first:
                raise UsageError(f"cannot parse monomial {text!r}")
            sign = -1 if op == "/" else 1
            if exp is None:
                d = 2
            else:
                exp = exp.strip("()")
                d = int(exp[:-2]) if exp.endswith("/2") else 2 * int(exp)
            if name != "1":
                out[name] = out.get(name, 0) + sign * d
            pos = m.end()
            first = False
        return cls(out)

    # container protocol
    def items(self) -> Tuple[Tuple[str, int], ...]:
        return self._items

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self._items)

    def doubled(self, v: str) -> int:
        for name, e in self._items:
            if name == v:
                return e
        return 0

    def __bool__(self) -> bool:
        return bool(self._items)

    def is_one(self) -> bool:
        return not self._items

    def is_integral(self) -> bool:
        return all(e % 2 == 0 for _, e in self._items)

    def require_integral(self) -> "HalfMonomial":
        if not self.is_integral():
            raise LatticeViolation(f"{self} is not in the integer lattice")
        return self

    def half(self) -> "HalfMonomial":
        """Square root; needs every doubled exponent even."""
        self.require_integral()
        return HalfMonomial({v: e // 2 for v, e in self._items})

    def __mul__(self, other: "HalfMonomial") -> "HalfMonomial":
        d = dict(self._items)
        for v, e in other._items:
            d[v] = d.get(v, 0) + e
        return HalfMonomial(d)

    def __truediv__(self, other: "HalfMonomial") -> "HalfMonomial":
        return self * other.inverse()

    def __pow__(self, k: int) -> "HalfMonomial":
        return HalfMonomial({v: e * k for v, e in self._items})

    def inverse(self) -> "HalfMonomial":
        return HalfMonomial({v: -e for v, e in self._items})

    def rename(self, mapping: Mapping[str, "HalfMonomial"]) -> "HalfMonomial":
        """Ring map sending each mapped variable to a monomial (integer exponents only)."""
        out: Dict[str, int] = {}
        for v, e in self._items:
            if v in mapping:
                if e % 2:
                    raise LatticeViolation(f"cannot substitute half power of {v}")
                for w, f in mapping[v]._items:
                    out[w] = out.get(w, 0) + f * (e // 2)
            else:
                out[v] = out.get(v, 0) + e
        return HalfMonomial(out)

    def key(self) -> Tuple[Tuple[str, int], ...]:
        return self._items

    def __eq__(self, other) -> bool:
        return isinstance(other, HalfMonomial) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "HalfMonomial") -> bool:
        return self._items < other._items

    def to_json(self) -> Dict[str, int]:
        return {v: e for v, e in self._items}

    @classmethod
    def from_json(cls, d: Mapping[str, int]) -> "HalfMonomial":
        return cls({str(k): int(v) for k, v in d.items()})

    def __str__(self) -> str:
        if not self._items:
            return "1"
        num, den = [], []
        for v, e in self._items:
            a = abs(e)
            p = v if a == 2 else (f"{v}^{a // 2}" if a % 2 == 0 else f"{v}^({a}/2)")
            (num if e > 0 else den).append(p)
        s = "*".join(num) if num else "1"
        if den:
            s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
        return s

    __repr__ = __str__


ONE = HalfMonomial()


def mono(text: str) -> HalfMonomial:
    return HalfMonomial.parse(text)


# ---------------------------------------------------------------------------
# epsilon-adic coefficients (used to approach a locus where two variables meet)


class EpsSeries:
    """Truncated Laurent series in a formal epsilon with exact coefficients.

    ``coeffs[i]`` is the coefficient of eps**(lo+i); everything from
    eps**(lo+len(coeffs)) on is unknown.
    """

    __slots__ = ("lo", "coeffs")

    def __init__(self, lo: int, coeffs: Sequence):
        coeffs = [mpq(c) for c in coeffs]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        self.lo = lo + start
        self.coeffs = coeffs[start:]

    @property
    def prec(self) -> int:
        return self.lo + len(self.coeffs)

    @classmethod
    def _zero(cls, prec: int) -> "EpsSeries":
        return cls(prec, [])

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> mpq:
        if k >= self.prec:
            raise UsageError("coefficient beyond known precision")
        if k < self.lo:
            return mpq(0)
        return self.coeffs[k - self.lo]

    def _lift(self, other) -> "EpsSeries":
        if isinstance(other, EpsSeries):
            return other
        return EpsSeries(0, [other] + [0] * max(0, self.prec))

    def __add__(self, other) -> "EpsSeries":
        other = self._lift(other)
        prec = min(self.prec, other.prec)
        lo = min(self.lo, other.lo)
        out = [mpq(0)] * max(0, prec - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.lo + i
                if k < prec:
                    out[k - lo] += c
        return EpsSeries(lo, out) if out else EpsSeries._zero(prec)

    __radd__ = __add__

    def __neg__(self) -> "EpsSeries":
        return EpsSeries(self.lo, [-c for c in self.coeffs]) if self.coeffs else EpsSeries._zero(self.prec)

    def __sub__(self, other) -> "EpsSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "EpsSeries":
        return (-self) + other

    def __mul__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            other = mpq(other)
            if other == 0:
                return EpsSeries._zero(self.prec)
            return EpsSeries(self.lo, [c * other for c in self.coeffs]) if self.coeffs else EpsSeries._zero(self.prec)
        if not self.coeffs or not other.coeffs:
            return EpsSeries._zero(min(self.prec + other.lo if other.coeffs else self.prec + other.prec,
                                       other.prec + self.lo if self.coeffs else other.prec + self.prec))
        n = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            acc = mpq(0)
            for i in range(k + 1):
                acc += a[i] * b[k - i]
            out.append(acc)
        return EpsSeries(self.lo + other.lo, out)

    __rmul__ = __mul__

    def reciprocal(self) -> "EpsSeries":
        if not self.coeffs:
            raise PoleAtEvaluation("division by an epsilon-series with no known nonzero term")
        a = self.coeffs
        n = len(a)
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n):
            acc = mpq(0)
            for i in range(1, k + 1):
                acc += a[i] * out[k - i]
            out.append(-acc * inv0)
        return EpsSeries(-self.lo, out)

    def __truediv__(self, other) -> "EpsSeries":
        if isinstance(other, EpsSeries):
            return self * other.reciprocal()
        return self * (1 / mpq(other))

    def __rtruediv__(self, other) -> "EpsSeries":
        return self.reciprocal() * other

    def __pow__(self, k: int) -> "EpsSeries":
        if k < 0:
            return self.reciprocal() ** (-k)
        out = EpsSeries(0, [1] + [0] * max(len(self.coeffs) - 1, 0))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsSeries):
            other = self._lift(other)
        diff = self - other
        return diff.is_zero()

    __hash__ = None

    def __repr__(self) -> str:
        terms = [f"{rational_str(c)}*e^{self.lo + i}" for i, c in enumerate(self.coeffs)]
        return "(" + " + ".join(terms) + f" + O(e^{self.prec}))"


def _is_zero(c) -> bool:
    if isinstance(c, EpsSeries):
        return c.is_zero()
    return c == 0


# ---------------------------------------------------------------------------
# truncated q-series; coefficients are plain lists internally


def _mul_lists(a: List, b: List, n: int) -> List:
    out = []
    for k in range(n):
        acc = a[0] * b[k]
        for i in range(1, k + 1):
            acc = acc + a[i] * b[k - i]
        out.append(acc)
    return out


def _inv_list(a: List, n: int) -> List:
    if _is_zero(a[0]):
        raise PoleAtEvaluation("series with zero constant term is not invertible")
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, n):
        acc = a[1] * out[k - 1]
        for i in range(2, k + 1):
            acc = acc + a[i] * out[k - i]
        out.append(-(acc * inv0))
    return out


class QSeries:
    """Power series in q truncated after q**order."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: Optional[int] = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise UsageError("order must be non-negative")
        if len(coeffs) < order + 1:
            coeffs += [mpq(0)] * (order + 1 - len(coeffs))
        self.order = order
        self.coeffs = [c if isinstance(c, EpsSeries) else mpq(c) for c in coeffs[: order + 1]]

    @classmethod
    def constant(cls, c, order: int) -> "QSeries":
        return cls([c], order)

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls([], order)

    def _check(self, other: "QSeries") -> None:
        if self.order != other.order:
            raise UsageError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "QSeries") -> "QSeries":
        self._check(other)
        return QSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: "QSeries") -> "QSeries":
        self._check(other)
        return QSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self) -> "QSeries":
        return QSeries([-a for a in self.coeffs], self.order)

    def scale(self, c) -> "QSeries":
        return QSeries([a * c for a in self.coeffs], self.order)

    def __mul__(self, other: "QSeries") -> "QSeries":
        return qs_mul(self, other)

    def invert(self) -> "QSeries":
        return qs_invert(self)

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def first_difference(self, other: "QSeries") -> Optional[int]:
        self._check(other)
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if not _is_zero(a - b):
                return i
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, QSeries) and self.order == other.order and self.first_difference(other) is None

    __hash__ = None

    def __getitem__(self, i: int):
        return self.coeffs[i]

    def __repr__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            s = repr(c) if isinstance(c, EpsSeries) else rational_str(c)
            parts.append(s if i == 0 else f"{s}*q^{i}")
        return " + ".join(parts) + f" + O(q^{self.order + 1})"


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    a._check(b)
    return QSeries(_mul_lists(a.coeffs, b.coeffs, a.order + 1), a.order)


def qs_invert(a: QSeries) -> QSeries:
    return QSeries(_inv_list(a.coeffs, a.order + 1), a.order)


# ---------------------------------------------------------------------------
# evaluation points


def _draw(rng: random.Random) -> mpq:
    while True:
        k = rng.randint(2, 40)
        d = rng.randint(2, 40)
        if k != d:
            return mpq(k, d)


class EvalPoint:
    """Assignment variable -> s with value s**2.

    Variables not given explicitly are drawn deterministically from
    ``(seed, index, name)``, so a point is a fixed function on the whole
    variable universe and can be shared between expressions.
    """

    def __init__(self, sqrt_assignment: Optional[Mapping[str, object]] = None,
                 rng_seed: Optional[int] = None, index: int = 0, lazy: bool = False):
        self._s: Dict[str, object] = {}
        for v, s in (sqrt_assignment or {}).items():
            s = s if isinstance(s, EpsSeries) else mpq(s)
            if not isinstance(s, EpsSeries) and (s <= 0 or s == 1):
                raise UsageError(f"bad square root {s} for {v}")
            self._s[v] = s
        self.rng_seed = rng_seed
        self.index = index
        self.lazy = lazy

    def sqrt_value(self, v: str):
        s = self._s.get(v)
        if s is None:
            if not self.lazy:
                raise UsageError(f"variable {v} is not assigned")
            s = _draw(random.Random(f"{self.rng_seed}:{self.index}:{v}"))
            self._s[v] = s
        return s

    def value(self, v: str):
        s = self.sqrt_value(v)
        return s * s

    def with_values(self, overrides: Mapping[str, object]) -> "EvalPoint":
        p = EvalPoint(rng_seed=self.rng_seed, index=self.index, lazy=self.lazy)
        p._s = dict(self._s)
        for v, s in overrides.items():
            p._s[v] = s
        return p

    def assignment(self) -> Dict[str, str]:
        return {v: (repr(s) if isinstance(s, EpsSeries) else rational_str(s)) for v, s in sorted(self._s.items())}

    def __repr__(self) -> str:
        return f"EvalPoint(seed={self.rng_seed}, index={self.index}, s={self.assignment()})"


def eval_monomial(m: HalfMonomial, p: EvalPoint):
    out = mpq(1)
    for v, e in m.items():
        s = p.sqrt_value(v)
        out = out * (s ** e)
    return out


def random_point(variables: Iterable[str], rng: random.Random) -> EvalPoint:
    return EvalPoint({v: _draw(rng) for v in sorted(set(variables))})


def lazy_points(seed: int) -> Iterator[EvalPoint]:
    """Endless deterministic stream of lazily populated points."""
    i = 0
    while True:
        yield EvalPoint(rng_seed=seed, index=i, lazy=True)
        i += 1
