"""Torus fixed points of Bott-Samelson resolutions and their local classes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .exactseries import HalfMonomial, UsageError
from .rootdata import (RootDatum, WeylElement, act_on_monomial, coroot_mu_monomial,
                       line_bundle_char)
from .theta import FactoredExpr, delta, product

H = HalfMonomial.var("h")


class KLTViolation(ValueError):
    """A boundary multiplicity equal to 1 (the log pair is not KLT)."""


@dataclass(frozen=True)
class BSFixedPoint:
    word: Tuple[int, ...]
    sequence: Tuple[int, ...]
    image: WeylElement
    tangent_chars: Tuple[HalfMonomial, ...]
    boundary_mults: Tuple[HalfMonomial, ...]
    prefix_images: Tuple[WeylElement, ...]

    def __str__(self) -> str:
        return "".join(map(str, self.sequence)) or "()"


def _require_reduced(datum: RootDatum, word: Sequence[int]) -> None:
    if not datum.group.is_reduced(word):
        raise UsageError(f"word {tuple(word)} is not reduced")


def boundary_multiplicities(datum: RootDatum, word: Sequence[int]) -> Tuple[HalfMonomial, ...]:
    """h^<lambda, w2^-1(alpha_k^vee)> for each split word = w1 s_k w2."""
    G = datum.group
    out = []
    for j, k in enumerate(word):
        w2inv = G.element(tuple(reversed(word[j + 1:])))
        out.append(coroot_mu_monomial(w2inv.act_coweight(datum.simple_coroot(k))))
    return tuple(out)


def fixed_point(datum: RootDatum, word: Sequence[int], sequence: Sequence[int],
                mults: Tuple[HalfMonomial, ...] | None = None) -> BSFixedPoint:
    word = tuple(word)
    sequence = tuple(int(e) for e in sequence)
    if len(word) != len(sequence) or any(e not in (0, 1) for e in sequence):
        raise UsageError("sequence must be a 01-word of the same length as the word")
    G = datum.group
    cur = G.identity
    chars, prefixes = [], []
    for k, e in zip(word, sequence):
        prefixes.append(cur)
        ch = line_bundle_char(k, cur)
        chars.append(ch if e == 0 else ch.inverse())
        if e:
            cur = cur * G.s(k)
    if mults is None:
        mults = boundary_multiplicities(datum, word)
    return BSFixedPoint(word, sequence, cur, tuple(chars), mults, tuple(prefixes))


def enumerate_fixed_points(datum: RootDatum, word: Sequence[int]) -> List[BSFixedPoint]:
    word = tuple(word)
    _require_reduced(datum, word)
    mults = boundary_multiplicities(datum, word)
    return [fixed_point(datum, word, seq, mults) for seq in itertools.product((0, 1), repeat=len(word))]


def local_klt_class(tangent_chars: Sequence[HalfMonomial], mult_monomials: Sequence[HalfMonomial]) -> FactoredExpr:
    """prod delta(t_i, h^(1-a_i)) where mult_i = h^(a_i)."""
    if len(tangent_chars) != len(mult_monomials):
        raise UsageError("need one multiplicity per tangent character")
    factors = []
    for t, m in zip(tangent_chars, mult_monomials):
        if m == H:
            raise KLTViolation(f"multiplicity h^1 at character {t}")
        factors.append(delta(t, H / m))
    return product(factors)


def point_mults(x: BSFixedPoint) -> List[HalfMonomial]:
    """KLT multiplicities at x: boundary divisors for 0-letters, none for 1-letters."""
    return [H / b if e == 0 else HalfMonomial() for e, b in zip(x.sequence, x.boundary_mults)]


def bs_local_class(datum: RootDatum, x: BSFixedPoint) -> FactoredExpr:
    """Local class of Z_word at x by the one-letter recursion with the mu-twist."""
    G = datum.group
    out = FactoredExpr.one()
    for j, (k, e) in enumerate(zip(x.word, x.sequence)):
        sk = G.s(k)
        out = out.map_monomials(lambda m, sk=sk: act_on_monomial(sk, m, "mu"))
        ch = line_bundle_char(k, x.prefix_images[j])
        if e == 0:
            out = out * delta(ch, coroot_mu_monomial(datum.simple_coroot(k)))
        else:
            out = out * delta(ch.inverse(), H)
    return out
