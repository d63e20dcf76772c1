"""Local elliptic classes of Schubert varieties, by three independent routes.

* ``schubert_local_bs``: right multiplication along the canonical word,
  with the mu-twist (the Bott-Samelson recursion);
* ``schubert_local_rmatrix``: left multiplication with the z-twist;
* ``schubert_local_pushforward``: sum of Bott-Samelson fixed point classes.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .bottsamelson import H, bs_local_class, enumerate_fixed_points
from .exactseries import HalfMonomial, PoleAtEvaluation, UsageError
from .rootdata import (RootDatum, WeylElement, act_on_monomial, build_root_datum,
                       coroot_mu_monomial, line_bundle_char, z_monomial)
from .theta import (Checker, FactoredExpr, delta, one_minus, product, theta, total)


class ConsistencyError(RuntimeError):
    """Two routes that must agree produced different classes."""


class GoldenChecksumError(ValueError):
    pass


def _cache(datum: RootDatum, name: str) -> dict:
    return datum.__dict__.setdefault("_ell_" + name, {})


def _mu_twist(w: WeylElement, e: FactoredExpr) -> FactoredExpr:
    return e.map_monomials(lambda m: act_on_monomial(w, m, "mu"))


def _z_twist(w: WeylElement, e: FactoredExpr) -> FactoredExpr:
    return e.map_monomials(lambda m: act_on_monomial(w, m, "z"))


def nu(datum: RootDatum, k: int) -> HalfMonomial:
    """nu_k = h^<lambda, alpha_k^vee> as a mu-monomial."""
    return coroot_mu_monomial(datum.simple_coroot(k))


def kappa(nu_value: HalfMonomial) -> FactoredExpr:
    return delta(H, nu_value) * delta(H, nu_value.inverse())


# routes --------------------------------------------------------------------

def schubert_local_bs(datum: RootDatum, omega: WeylElement, sigma: WeylElement) -> FactoredExpr:
    cache = _cache(datum, "bs")
    key = (omega.key, sigma.key)
    if key in cache:
        return cache[key]
    G = datum.group
    if omega.is_identity():
        out = FactoredExpr.one() if sigma.is_identity() else FactoredExpr.zero()
    elif not G.bruhat_leq(sigma, omega):
        out = FactoredExpr.zero()
    else:
        k = omega.word[-1]
        sk = G.s(k)
        prev = G.element(omega.word[:-1])
        L = line_bundle_char(k, sigma)
        out = (_mu_twist(sk, schubert_local_bs(datum, prev, sigma)) * delta(L, nu(datum, k))
               + _mu_twist(sk, schubert_local_bs(datum, prev, sigma * sk)) * delta(L, H))
    cache[key] = out
    return out


def schubert_local_rmatrix(datum: RootDatum, omega: WeylElement, sigma: WeylElement) -> FactoredExpr:
    cache = _cache(datum, "rm")
    key = (omega.key, sigma.key)
    if key in cache:
        return cache[key]
    G = datum.group
    if omega.is_identity():
        out = FactoredExpr.one() if sigma.is_identity() else FactoredExpr.zero()
    else:
        k = omega.word[0]
        sk = G.s(k)
        rest = sk * omega
        zeta = line_bundle_char(k, G.identity)
        twisted = act_on_monomial(rest.inverse(), nu(datum, k), "mu")
        out = (delta(zeta, twisted) * schubert_local_rmatrix(datum, rest, sigma)
               + delta(zeta.inverse(), H) * _z_twist(sk, schubert_local_rmatrix(datum, rest, sk * sigma)))
    cache[key] = out
    return out


def pushforward_by_image(datum: RootDatum, word: Sequence[int]) -> Dict[tuple, FactoredExpr]:
    cache = _cache(datum, "push")
    word = tuple(word)
    if word not in cache:
        groups: Dict[tuple, List[FactoredExpr]] = {}
        for x in enumerate_fixed_points(datum, word):
            groups.setdefault(x.image.key, []).append(bs_local_class(datum, x))
        cache[word] = {k: total(v) for k, v in groups.items()}
    return cache[word]


def schubert_local_pushforward(datum: RootDatum, word: Sequence[int], sigma: WeylElement) -> FactoredExpr:
    return pushforward_by_image(datum, word).get(sigma.key, FactoredExpr.zero())


def diagonal_class(datum: RootDatum, omega: WeylElement) -> FactoredExpr:
    """prod of delta(z^alpha, h) over positive alpha with omega^-1(alpha) negative."""
    inv = omega.inverse()
    return product(delta(z_monomial(a), H) for a in datum.positive_roots
                   if not datum.is_positive(inv.act_weight(a)))


# recursions in the downgoing direction ---------------------------------------

def bs_recursion_sides(datum: RootDatum, omega: WeylElement, sigma: WeylElement, k: int):
    """(lhs, rhs) of the right-multiplication recursion in either length case."""
    G = datum.group
    sk = G.s(k)
    L = line_bundle_char(k, sigma)
    lhs = (delta(L, nu(datum, k)) * _mu_twist(sk, schubert_local_bs(datum, omega, sigma))
           + delta(L, H) * _mu_twist(sk, schubert_local_bs(datum, omega, sigma * sk)))
    target = schubert_local_bs(datum, omega * sk, sigma)
    if (omega * sk).length < omega.length:
        target = kappa(nu(datum, k)) * target
    return lhs, target


def rmatrix_recursion_sides(datum: RootDatum, omega: WeylElement, sigma: WeylElement, k: int):
    """(lhs, rhs) of the left-multiplication recursion in either length case."""
    G = datum.group
    sk = G.s(k)
    zeta = line_bundle_char(k, G.identity)
    twisted = act_on_monomial(omega.inverse(), nu(datum, k), "mu")
    lhs = (delta(zeta, twisted) * schubert_local_bs(datum, omega, sigma)
           + _z_twist(sk, delta(zeta, H) * schubert_local_bs(datum, omega, sk * sigma)))
    target = schubert_local_bs(datum, sk * omega, sigma)
    if (sk * omega).length < omega.length:
        target = kappa(twisted) * target
    return lhs, target


# Euler classes, rescaling and q -> 0 ------------------------------------------

def euler_class(datum: RootDatum, sigma: WeylElement, theory: str = "ell") -> FactoredExpr:
    chars = [z_monomial(sigma.act_weight(a)) for a in datum.positive_roots]
    if theory == "ell":
        return product(theta(c.inverse()) for c in chars)
    if theory == "K":
        return product(one_minus(c) for c in chars)
    raise UsageError(f"unknown theory {theory!r}")


def rescaling_factor(datum: RootDatum, omega: WeylElement) -> FactoredExpr:
    """prod of delta(h^<lambda,-alpha^vee>, h) over alpha > 0 with omega(alpha) < 0."""
    return product(delta(coroot_mu_monomial(tuple(-x for x in datum.coroot(a))), H)
                   for a in datum.positive_roots if not datum.is_positive(omega.act_weight(a)))


def rescaled_class(datum: RootDatum, omega: WeylElement, sigma: WeylElement) -> FactoredExpr:
    return schubert_local_bs(datum, omega, sigma) / rescaling_factor(datum, omega)


def q_zero_limit_factor(kind: str, x, second=None) -> FactoredExpr:
    """q^0 coefficient of delta(x, h) (internal) or delta(x, nu) (boundary)."""
    x = HalfMonomial.parse(x) if isinstance(x, str) else x
    if kind == "internal":
        y = H if second is None else second
    elif kind == "boundary":
        if second is None:
            raise UsageError("boundary limit needs the nu argument")
        y = HalfMonomial.parse(second) if isinstance(second, str) else second
    else:
        raise UsageError(f"unknown kind {kind!r}")
    x.require_integral()
    y.require_integral()
    if x.is_one() or y.is_one():
        raise PoleAtEvaluation("limit factor has a pole at argument 1")
    return one_minus((x * y).inverse()) / (one_minus(x.inverse()) * one_minus(y.inverse()))


# tables -------------------------------------------------------------------------

@dataclass
class LocalClassTable:
    datum: RootDatum
    entries: Dict[Tuple[WeylElement, WeylElement], FactoredExpr] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, omega: WeylElement, sigma: WeylElement) -> FactoredExpr:
        return self.entries[(omega, sigma)]

    def to_json_obj(self) -> dict:
        rows = []
        for (om, sg), e in sorted(self.entries.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())):
            rows.append({"omega": list(om.word), "sigma": list(sg.word), "expr": e.to_json_obj()})
        return {"group": self.datum.name, "entries": rows}


def emit_table(datum: RootDatum, checker: Optional[Checker] = None, cross_check: bool = True,
               cap: int = 120) -> LocalClassTable:
    G = datum.group
    if len(G) > cap:
        raise UsageError(f"|W| = {len(G)} exceeds the table cap {cap}")
    checker = checker or Checker()
    table = LocalClassTable(datum)
    for om in G:
        for sg in G:
            e = schubert_local_bs(datum, om, sg)
            if cross_check:
                for name, other in (("rmatrix", schubert_local_rmatrix(datum, om, sg)),
                                    ("pushforward", schubert_local_pushforward(datum, om.word, sg))):
                    c = checker.compare(e, other)
                    if not c.equal:
                        raise ConsistencyError(f"bs vs {name} at omega={om}, sigma={sg}: {c.detail()}")
            table.entries[(om, sg)] = e
    return table


def entries_checksum(entries) -> str:
    blob = json.dumps(entries, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_golden(name_or_path: str) -> dict:
    """Load a golden table (built-in name 'gl3'/'sp2' or a path) and verify its checksum."""
    if os.path.exists(name_or_path):
        with open(name_or_path) as fh:
            obj = json.load(fh)
    else:
        base = os.path.basename(name_or_path)
        base = base if base.endswith(".json") else base + ".json"
        obj = json.loads(resources.files("ellischub").joinpath("data").joinpath(base).read_text())
    want = obj.get("sha256")
    if want is not None and entries_checksum(obj["entries"]) != want:
        raise GoldenChecksumError(f"checksum mismatch in {name_or_path}")
    return obj


def golden_diff(datum: RootDatum, golden: dict, checker: Optional[Checker] = None,
                table: Optional[LocalClassTable] = None) -> List[dict]:
    """One record per golden entry: status 'match' or 'mismatch' with detail."""
    checker = checker or Checker()
    G = datum.group
    out = []
    for row in golden["entries"]:
        om, sg = G.element(row["omega"]), G.element(row["sigma"])
        want = FactoredExpr.from_json_obj(row["expr"])
        got = table.get(om, sg) if table is not None else schubert_local_bs(datum, om, sg)
        c = checker.compare(got, want)
        out.append({"omega": str(om), "sigma": str(sg), "status": "match" if c.equal else "mismatch",
                    "detail": c.detail()})
    return out


def datum_for_golden(golden: dict) -> RootDatum:
    return build_root_datum(golden["group"])
