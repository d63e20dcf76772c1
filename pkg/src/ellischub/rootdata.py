"""Root data, Weyl groups, Bruhat order and the z / mu monomial actions.

Roots and coroots are integer vectors in ambient coordinates, paired by the
dot product.  Variables: ``z1..zn`` carry torus characters (weights),
``mu1..mun`` carry the dynamical variables (coweights), ``g1..gn`` is the
gamma copy of the z-variables, and ``h`` is fixed by every action.

A monomial h^<lambda, b> with b a coroot is written prod mu_i^(-b_i).
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .exactseries import HalfMonomial, UsageError

Vector = Tuple[int, ...]
Matrix = Tuple[Tuple[int, ...], ...]

ROOT_CAP = 10_000


class InvalidDatum(ValueError):
    pass


def _rank(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)) for i in range(n))


def _matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _neg(v: Sequence[int]) -> Vector:
    return tuple(-x for x in v)


class RootDatum:
    """Finite root datum given by simple roots and simple coroots."""

    def __init__(self, simple_roots: Sequence[Sequence[int]], simple_coroots: Sequence[Sequence[int]],
                 name: str = "custom"):
        self.name = name
        self.simple_roots: Tuple[Vector, ...] = tuple(tuple(int(x) for x in r) for r in simple_roots)
        self.simple_coroots: Tuple[Vector, ...] = tuple(tuple(int(x) for x in r) for r in simple_coroots)
        self.rank = len(self.simple_roots)
        if len(self.simple_coroots) != self.rank:
            raise InvalidDatum("need as many coroots as roots")
        dims = {len(v) for v in self.simple_roots + self.simple_coroots}
        if self.rank and len(dims) != 1:
            raise InvalidDatum("all vectors need the same ambient dimension")
        self.ambient_dim = dims.pop() if self.rank else 0
        if self.rank and _rank(self.simple_roots) != self.rank:
            raise InvalidDatum("simple roots are not linearly independent")
        # cartan[j][k] = <alpha_j, alpha_k^vee>
        self.cartan = tuple(tuple(_dot(a, c) for c in self.simple_coroots) for a in self.simple_roots)
        for j in range(self.rank):
            if self.cartan[j][j] != 2:
                raise InvalidDatum("Cartan matrix must have 2 on the diagonal")
            for k in range(self.rank):
                if j != k and (self.cartan[j][k] > 0 or (self.cartan[j][k] == 0) != (self.cartan[k][j] == 0)):
                    raise InvalidDatum("invalid off-diagonal Cartan integers")
        self._close_roots()
        self._group: Optional[WeylGroup] = None

    # roots ----------------------------------------------------------------
    def _close_roots(self) -> None:
        r = self.rank
        A = self.cartan
        start = [(tuple(int(i == j) for i in range(r)), tuple(int(i == j) for i in range(r))) for j in range(r)]
        seen = {p[0]: p[1] for p in start}
        frontier = list(start)
        while frontier:
            new = []
            for c, d in frontier:
                for k in range(r):
                    pc = sum(c[j] * A[j][k] for j in range(r))
                    pd = sum(d[j] * A[k][j] for j in range(r))
                    c2 = tuple(c[i] - (pc if i == k else 0) for i in range(r))
                    d2 = tuple(d[i] - (pd if i == k else 0) for i in range(r))
                    if c2 not in seen:
                        seen[c2] = d2
                        new.append((c2, d2))
                        if len(seen) > ROOT_CAP:
                            raise InvalidDatum("root closure does not terminate")
            frontier = new
        pos = [c for c in seen if all(x >= 0 for x in c)]
        if len(pos) * 2 != len(seen):
            raise InvalidDatum("roots are not split into positive and negative halves")
        pos.sort(key=lambda c: (sum(c), tuple(-x for x in c)))
        self.positive_root_coords: Tuple[Vector, ...] = tuple(pos)
        self.positive_roots: Tuple[Vector, ...] = tuple(self.root_vector(c) for c in pos)
        self.root_to_coroot: Dict[Vector, Vector] = {}
        for c, d in seen.items():
            self.root_to_coroot[self.root_vector(c)] = self.coroot_vector(d)
        self._coords_of = {self.root_vector(c): c for c in seen}

    def root_vector(self, coords: Sequence[int]) -> Vector:
        return tuple(sum(coords[j] * self.simple_roots[j][i] for j in range(self.rank)) for i in range(self.ambient_dim))

    def coroot_vector(self, coords: Sequence[int]) -> Vector:
        return tuple(sum(coords[j] * self.simple_coroots[j][i] for j in range(self.rank)) for i in range(self.ambient_dim))

    def coroot(self, root: Sequence[int]) -> Vector:
        return self.root_to_coroot[tuple(root)]

    def is_positive(self, root: Sequence[int]) -> bool:
        return all(x >= 0 for x in self._coords_of[tuple(root)])

    def is_root(self, v: Sequence[int]) -> bool:
        return tuple(v) in self._coords_of

    def simple_root(self, k: int) -> Vector:
        return self.simple_roots[k - 1]

    def simple_coroot(self, k: int) -> Vector:
        return self.simple_coroots[k - 1]

    # reflections on the ambient lattices ------------------------------------
    def weight_reflection(self, root: Sequence[int]) -> Matrix:
        """x -> x - <x, root^vee> root."""
        a, c = tuple(root), self.coroot(root)
        n = self.ambient_dim
        return tuple(tuple(int(i == j) - a[i] * c[j] for j in range(n)) for i in range(n))

    def coweight_reflection(self, root: Sequence[int]) -> Matrix:
        """y -> y - <root, y> root^vee."""
        a, c = tuple(root), self.coroot(root)
        n = self.ambient_dim
        return tuple(tuple(int(i == j) - c[i] * a[j] for j in range(n)) for i in range(n))

    @property
    def group(self) -> "WeylGroup":
        if self._group is None:
            self._group = WeylGroup(self)
        return self._group

    def is_type_a(self) -> bool:
        n = self.ambient_dim
        if self.rank != n - 1:
            return False
        for k in range(1, n):
            e = tuple(int(i == k - 1) - int(i == k) for i in range(n))
            if self.simple_roots[k - 1] != e or self.simple_coroots[k - 1] != e:
                return False
        return True

    def __repr__(self) -> str:
        return f"RootDatum({self.name}, rank={self.rank}, ambient={self.ambient_dim})"


@dataclass(frozen=True)
class WeylElement:
    """Element of a Weyl group; equality is equality of the action."""

    word: Tuple[int, ...]
    length: int
    key: Matrix
    action_matrix: Matrix = field(compare=False, repr=False)
    coweight_matrix: Matrix = field(compare=False, repr=False)
    group: "WeylGroup" = field(compare=False, repr=False, hash=False)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return self.group.mul(self, other)

    def inverse(self) -> "WeylElement":
        return self.group.inverse(self)

    def act_weight(self, v: Sequence[int]) -> Vector:
        return _matvec(self.action_matrix, v)

    def act_coweight(self, v: Sequence[int]) -> Vector:
        return _matvec(self.coweight_matrix, v)

    def is_identity(self) -> bool:
        return self.length == 0

    def perm(self) -> Tuple[int, ...]:
        """One-line notation (1-based) for type A: w(e_i) = e_{w(i)}."""
        m = self.action_matrix
        n = len(m)
        out = []
        for i in range(n):
            j = next(r for r in range(n) if m[r][i] == 1)
            out.append(j + 1)
        return tuple(out)

    def __str__(self) -> str:
        return "id" if not self.word else "".join(f"s{k}" for k in self.word)

    def sort_key(self):
        return (self.length, self.word)


class WeylGroup:
    """All elements of W(datum), enumerated by breadth-first search."""

    def __init__(self, datum: RootDatum, cap: int = 100_000):
        self.datum = datum
        r = datum.rank
        n = datum.ambient_dim
        A = datum.cartan
        # s_k in simple-root coordinates: column j = s_k(alpha_j)
        self._sk: List[Matrix] = []
        for k in range(r):
            cols = []
            for j in range(r):
                cols.append(tuple(int(i == j) - (A[j][k] if i == k else 0) for i in range(r)))
            self._sk.append(tuple(tuple(cols[j][i] for j in range(r)) for i in range(r)))
        self._wk = [datum.weight_reflection(a) for a in datum.simple_roots]
        self._ck = [datum.coweight_reflection(a) for a in datum.simple_roots]
        ident = _identity(r)
        data: Dict[Matrix, Tuple[Matrix, Matrix]] = {ident: (_identity(n), _identity(n))}
        frontier = [ident]
        while frontier:
            new = []
            for key in frontier:
                wm, cm = data[key]
                for k in range(r):
                    k2 = _matmul(key, self._sk[k])
                    if k2 not in data:
                        data[k2] = (_matmul(wm, self._wk[k]), _matmul(cm, self._ck[k]))
                        new.append(k2)
                        if len(data) > cap:
                            raise InvalidDatum("Weyl group too large")
            frontier = new
        pos = datum.positive_root_coords

        def length(key: Matrix) -> int:
            return sum(1 for c in pos if any(x < 0 for x in _matvec(key, c)))

        lengths = {key: length(key) for key in data}
        words: Dict[Matrix, Tuple[int, ...]] = {ident: ()}
        for key in sorted(data, key=lambda m: lengths[m]):
            if key == ident:
                continue
            for k in range(r):
                left = _matmul(self._sk[k], key)
                if lengths[left] < lengths[key]:
                    words[key] = (k + 1,) + words[left]
                    break
        self.elements: List[WeylElement] = []
        self._by_key: Dict[Matrix, WeylElement] = {}
        for key in data:
            wm, cm = data[key]
            e = WeylElement(words[key], lengths[key], key, wm, cm, self)
            self._by_key[key] = e
            self.elements.append(e)
        self.elements.sort(key=lambda e: e.sort_key())
        self.identity = self._by_key[ident]
        self.simple = [self._by_key[self._sk[k]] for k in range(r)]
        self._mul: Dict[Tuple[Matrix, Matrix], WeylElement] = {}
        self._below: Dict[Matrix, FrozenSet[Matrix]] = {}
        self._perm: Optional[Dict[Tuple[int, ...], WeylElement]] = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def s(self, k: int) -> WeylElement:
        return self.simple[k - 1]

    def mul(self, a: WeylElement, b: WeylElement) -> WeylElement:
        k = (a.key, b.key)
        r = self._mul.get(k)
        if r is None:
            r = self._mul[k] = self._by_key[_matmul(a.key, b.key)]
        return r

    def inverse(self, a: WeylElement) -> WeylElement:
        return self.element(tuple(reversed(a.word)))

    def element(self, word: Sequence[int]) -> WeylElement:
        e = self.identity
        for k in word:
            if not 1 <= k <= self.datum.rank:
                raise UsageError(f"simple index {k} out of range")
            e = self.mul(e, self.simple[k - 1])
        return e

    def longest(self) -> WeylElement:
        return self.elements[-1]

    def from_permutation(self, perm: Sequence[int]) -> WeylElement:
        if self._perm is None:
            self._perm = {e.perm(): e for e in self.elements}
        return self._perm[tuple(perm)]

    def reduced_words(self, w: WeylElement) -> List[Tuple[int, ...]]:
        if w.length == 0:
            return [()]
        out = []
        for k in range(1, self.datum.rank + 1):
            u = self.mul(w, self.s(k))
            if u.length < w.length:
                out += [x + (k,) for x in self.reduced_words(u)]
        return sorted(out)

    def is_reduced(self, word: Sequence[int]) -> bool:
        return self.element(word).length == len(word)

    def below(self, w: WeylElement) -> FrozenSet[Matrix]:
        r = self._below.get(w.key)
        if r is None:
            keys = {self.identity.key}
            for k in w.word:
                sk = self.s(k)
                keys |= {_matmul(x, sk.key) for x in keys}
            r = self._below[w.key] = frozenset(keys)
        return r

    def bruhat_leq(self, sigma: WeylElement, omega: WeylElement) -> bool:
        return sigma.key in self.below(omega)

    def reflections(self) -> List[WeylElement]:
        out = []
        for c in self.datum.positive_root_coords:
            root = self.datum.root_vector(c)
            m = self.datum.weight_reflection(root)
            out.append(next(e for e in self.elements if e.action_matrix == m))
        return out


# built-in data ----------------------------------------------------------------

def type_a(n: int) -> RootDatum:
    """A_{n-1} inside GL_n: alpha_k = alpha_k^vee = e_k - e_{k+1}."""
    roots = [tuple(int(i == k) - int(i == k + 1) for i in range(n)) for k in range(n - 1)]
    return RootDatum(roots, roots, name=f"a{n - 1}")


def type_c2() -> RootDatum:
    return RootDatum([(1, -1), (0, 2)], [(1, -1), (0, 1)], name="c2")


BUILTIN = ("a1", "a2", "a3", "a4", "c2")

_CACHE: Dict[str, RootDatum] = {}


def build_root_datum(spec) -> RootDatum:
    """Name of a built-in datum, a path to a JSON file, or a mapping."""
    if isinstance(spec, RootDatum):
        return spec
    if isinstance(spec, str):
        key = spec.lower()
        if key in _CACHE:
            return _CACHE[key]
        if key in ("a1", "a2", "a3", "a4", "a5"):
            d = type_a(int(key[1]) + 1)
        elif key in ("c2", "sp2"):
            d = type_c2()
        elif os.path.exists(spec):
            with open(spec) as fh:
                obj = json.load(fh)
            d = RootDatum(obj["simple_roots"], obj["simple_coroots"], name=obj.get("name", os.path.basename(spec)))
        else:
            raise UsageError(f"unknown root datum {spec!r}")
        _CACHE[key] = d
        return d
    return RootDatum(spec["simple_roots"], spec["simple_coroots"], name=spec.get("name", "custom"))


def weyl_element(datum: RootDatum, word: Sequence[int]) -> WeylElement:
    return datum.group.element(word)


def bruhat_leq(sigma: WeylElement, omega: WeylElement) -> bool:
    return sigma.group.bruhat_leq(sigma, omega)


def bruhat_leq_oracle(group: WeylGroup) -> Dict[Matrix, FrozenSet[Matrix]]:
    """Order generated by w < wt whenever t is a reflection and length goes up."""
    refl = group.reflections()
    up: Dict[Matrix, set] = {w.key: set() for w in group}
    for w in group:
        for t in refl:
            u = group.mul(w, t)
            if u.length > w.length:
                up[w.key].add(u.key)
    below: Dict[Matrix, set] = {w.key: {w.key} for w in group}
    for w in sorted(group, key=lambda e: e.length):
        for u in up[w.key]:
            below[u] |= below[w.key]
    changed = True
    while changed:
        changed = False
        for w in sorted(group, key=lambda e: e.length):
            for u in up[w.key]:
                if not below[w.key] <= below[u]:
                    below[u] |= below[w.key]
                    changed = True
    return {k: frozenset(v) for k, v in below.items()}


# monomial dictionaries ---------------------------------------------------------

SORT_PREFIX = {"z": "z", "mu": "mu", "gamma": "g"}


def var_index(name: str, prefix: str) -> Optional[int]:
    if name.startswith(prefix) and name[len(prefix):].isdigit():
        return int(name[len(prefix):])
    return None


def sort_of(name: str) -> str:
    if name == "h":
        return "h"
    for sort, p in (("mu", "mu"), ("z", "z"), ("gamma", "g")):
        if var_index(name, p) is not None:
            return sort
    return "other"


def vector_monomial(vec: Sequence[int], prefix: str) -> HalfMonomial:
    return HalfMonomial({f"{prefix}{i + 1}": 2 * x for i, x in enumerate(vec)})


def z_monomial(vec: Sequence[int]) -> HalfMonomial:
    return vector_monomial(vec, "z")


def act_on_monomial(sigma: WeylElement, m: HalfMonomial, sort: str) -> HalfMonomial:
    """Push the exponent vector of the ``sort`` variables through sigma.

    The z- and gamma-sorts use the weight action, the mu-sort the coweight
    action; ``h`` and variables of other sorts are left alone.  A monomial
    mixing z with mu raises.
    """
    if sort not in SORT_PREFIX:
        raise UsageError(f"unknown sort {sort}")
    prefix = SORT_PREFIX[sort]
    sorts = {sort_of(v) for v in m.variables()} - {"h"}
    if sort in ("z", "mu") and {"z", "mu"} <= sorts:
        raise UsageError(f"mixed-sort monomial {m}")
    n = len(sigma.action_matrix)
    vec = [0] * n
    rest: Dict[str, int] = {}
    for v, e in m.items():
        i = var_index(v, prefix)
        if i is not None and sort_of(v) == sort:
            if i > n:
                raise UsageError(f"{v} outside the ambient lattice")
            vec[i - 1] = e
        else:
            rest[v] = e
    mat = sigma.coweight_matrix if sort == "mu" else sigma.action_matrix
    new = _matvec(mat, vec)
    for i, e in enumerate(new):
        if e:
            rest[f"{prefix}{i + 1}"] = rest.get(f"{prefix}{i + 1}", 0) + e
    return HalfMonomial(rest)


def act_on_mixed(sigma: WeylElement, m: HalfMonomial, sort: str) -> HalfMonomial:
    """Like act_on_monomial but tolerates other sorts (they stay fixed)."""
    prefix = SORT_PREFIX[sort]
    own = HalfMonomial({v: e for v, e in m.items() if sort_of(v) == sort})
    rest = HalfMonomial({v: e for v, e in m.items() if sort_of(v) != sort})
    return act_on_monomial(sigma, own, sort) * rest


def line_bundle_char(k: int, sigma: WeylElement) -> HalfMonomial:
    """Character z^(-sigma(alpha_k)) of L_k at the fixed point of sigma."""
    alpha = sigma.group.datum.simple_root(k)
    return z_monomial(_neg(sigma.act_weight(alpha)))


def coroot_mu_monomial(coroot: Sequence[int]) -> HalfMonomial:
    """h^<lambda, coroot> written as prod mu_i^(-coroot_i)."""
    return vector_monomial(_neg(coroot), "mu")


def root_z_form(root: Sequence[int]) -> Dict[str, int]:
    return {f"z{i + 1}": x for i, x in enumerate(root) if x}
