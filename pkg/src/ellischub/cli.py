"""Command-line front end: ``ellischub <suite> [options]``.

Every suite produces a list of checks {"id", "status", "detail"}; the exit
code is 0 when none failed, 1 otherwise and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence


from . import ellclasses as ec
from . import hecke, transforms, weightfn
from .exactseries import UsageError, lazy_points
from .rootdata import RootDatum, build_root_datum
from .theta import (DEFAULT_SEED, Checker, FactoredExpr, Evaluator, blowup_sides, delta, fay_residual,
                    four_term_sides, theta_prime_one)

SUITES = ("table", "check-recursions", "check-hecke", "check-weightfn", "check-transforms",
          "check-identities", "limits")


@dataclass
class RunConfig:
    suite: str
    group: Optional[str]
    order: int
    points: int
    seed: int
    format: str
    golden: Optional[str] = None
    n: int = 3
    trials: int = 3
    emit: Optional[str] = None

    def checker(self, order: Optional[int] = None) -> Checker:
        return Checker(self.order if order is None else order, self.points, self.seed)

    def datum(self) -> RootDatum:
        return build_root_datum(self.group or "a2")


def _check(cid: str, ok: bool, detail: str = "") -> dict:
    return {"id": cid, "status": "pass" if ok else "fail", "detail": "" if ok and not detail else detail}


def _cmp(cid: str, c) -> dict:
    return _check(cid, c.equal, c.detail())


# suites ---------------------------------------------------------------------------

def suite_table(cfg: RunConfig) -> List[dict]:
    golden = ec.load_golden(cfg.golden) if cfg.golden else None
    if golden is not None:
        datum = ec.datum_for_golden(golden)
        if cfg.group and build_root_datum(cfg.group).name != datum.name:
            raise UsageError(f"--group {cfg.group} does not match golden group {datum.name}")
    else:
        datum = cfg.datum()
    chk = cfg.checker()
    G = datum.group
    if len(G) > 120:
        raise UsageError(f"|W| = {len(G)} exceeds the table cap")
    out = []
    table = ec.LocalClassTable(datum)
    for om in G:
        for sg in G:
            e = ec.schubert_local_bs(datum, om, sg)
            table.entries[(om, sg)] = e
            out.append(_cmp(f"route rmatrix {om},{sg}", chk.compare(e, ec.schubert_local_rmatrix(datum, om, sg))))
            out.append(_cmp(f"route pushforward {om},{sg}",
                            chk.compare(e, ec.schubert_local_pushforward(datum, om.word, sg))))
    if golden is not None:
        for rec in ec.golden_diff(datum, golden, chk, table):
            out.append(_check(f"golden {rec['omega']},{rec['sigma']}", rec["status"] == "match", rec["detail"]))
    if cfg.emit:
        with open(cfg.emit, "w") as fh:
            json.dump(table.to_json_obj(), fh, indent=1, sort_keys=True)
    return out


def suite_recursions(cfg: RunConfig) -> List[dict]:
    datum = cfg.datum()
    chk = cfg.checker()
    G = datum.group
    out = []
    for om in G:
        out.append(_cmp(f"diagonal {om}", chk.compare(ec.diagonal_class(datum, om),
                                                       ec.schubert_local_bs(datum, om, om))))
        words = G.reduced_words(om)
        for sg in G:
            e = ec.schubert_local_bs(datum, om, sg)
            out.append(_cmp(f"route rmatrix {om},{sg}", chk.compare(e, ec.schubert_local_rmatrix(datum, om, sg))))
            for w in words:
                name = "".join(map(str, w)) or "id"
                out.append(_cmp(f"pushforward word {name},{sg}",
                                chk.compare(e, ec.schubert_local_pushforward(datum, w, sg))))
            for k in range(1, datum.rank + 1):
                out.append(_cmp(f"bs recursion {om},{sg},k={k}", chk.compare(*ec.bs_recursion_sides(datum, om, sg, k))))
                out.append(_cmp(f"rmatrix recursion {om},{sg},k={k}",
                                chk.compare(*ec.rmatrix_recursion_sides(datum, om, sg, k))))
    return out


def _relation_records(records: List[dict]) -> List[dict]:
    return [_check(f"{r['datum']} {r['relation']} trial {r['trial_seed']}", r["status"] == "pass")
            for r in records]


def suite_hecke(cfg: RunConfig) -> List[dict]:
    datum = cfg.datum()
    chk = cfg.checker(min(cfg.order, 3))
    out = []
    for kind in ("elliptic", "D", "A", "B", "Cq0", "Ctilde"):
        out += _relation_records(hecke.verify_relations(kind, datum, cfg.trials, cfg.seed, chk))
    free = {str(s) for s in hecke.ctilde_square_multiplier().free_symbols}
    out.append(_check("Ctilde multiplier independent of lambda", free <= {"h"}, ",".join(sorted(free))))
    return out


def suite_weightfn(cfg: RunConfig) -> List[dict]:
    n = cfg.n
    if not 1 <= n <= weightfn.WEIGHT_CAP:
        raise UsageError(f"--n must be in 1..{weightfn.WEIGHT_CAP}")
    chk = cfg.checker(min(cfg.order, 3))
    datum = build_root_datum(f"a{n - 1}") if n > 1 else None
    perms = weightfn.all_perms(n)
    out = []
    if datum is not None:
        for w in datum.group:
            W = weightfn.weight_function(w.perm()).expr
            for s in datum.group:
                lhs = weightfn.restrict(W, s.perm())
                rhs = ec.schubert_local_bs(datum, w, s) * weightfn.euler_ell(s.perm())
                out.append(_cmp(f"identification {w.perm()},{s.perm()}", chk.compare(lhs, rhs)))
    for w in perms:
        for k in range(1, n):
            for variant in ("ww", "wwh"):
                out.append(_cmp(f"rmatrix {variant} {w} k={k}", chk.compare(*weightfn.rmatrix_sides(w, k, variant))))
            out.append(_cmp(f"uniRW {w} k={k}", chk.compare(*weightfn.uniRW_sides(w, k))))
            lhs, rhs = weightfn.uniBSW_sides(w, k)
            for s in perms:
                out.append(_cmp(f"uniBSW {w} k={k} at {s}",
                                chk.compare(weightfn.restrict(lhs, s), weightfn.restrict(rhs, s))))
    if n == 2:
        c = chk.compare(*weightfn.uniBSW_sides((1, 2), 1))
        out.append(_check("negative control: unrestricted uniBSW differs", not c.equal, c.detail()))
    if n > 1:
        out += weightfn.check_axioms(n, chk)
    return out


def suite_transforms(cfg: RunConfig) -> List[dict]:
    datum = cfg.datum()
    out = transforms.check_transform_theorems(datum)
    if datum.is_type_a():
        n = datum.ambient_dim
        for w in weightfn.all_perms(n):
            for k in range(1, n):
                ok, no_gamma = transforms.q_differences_ok(w, k)
                out.append(_check(f"Q second differences {w} k={k}", ok))
                out.append(_check(f"Q differences free of gamma {w} k={k}", no_gamma))
    return out


def _delta_printed(a, b) -> List:
    return [(1 - 1 / (a * b)) / ((1 - 1 / a) * (1 - 1 / b)),
            1 / (a * b) - a * b,
            1 / (a * a * b) + 1 / (a * b * b) - a * a * b - a * b * b]


def suite_identities(cfg: RunConfig) -> List[dict]:
    chk = cfg.checker()
    out = [
        _cmp("fay trisecant", chk.compare(fay_residual("z1", "z2", "z3", "z4"), FactoredExpr.zero())),
        _cmp("blow-up", chk.compare(*blowup_sides())),
        _cmp("four-term", chk.compare(*four_term_sides())),
    ]
    tp = theta_prime_one(3).coeffs
    out.append(_check("theta'(1) to q^3", list(tp) == [1, -2, -1, 2], str(list(tp))))
    e = delta("a", "b")
    stream = lazy_points(cfg.seed)
    for i in range(cfg.points):
        p = next(stream)
        got = Evaluator(p, 2).values(e)
        want = _delta_printed(p.value("a"), p.value("b"))
        out.append(_check(f"delta q-coefficients point {i}", got == want, f"{got} vs {want}"))
    return out


def suite_limits(cfg: RunConfig) -> List[dict]:
    datum = cfg.datum()
    out = []
    stream = lazy_points(cfg.seed)
    for i in range(cfg.points):
        p = next(stream)
        ev = Evaluator(p, 0)
        for kind, second, atom in (("internal", None, delta("x", "h")), ("boundary", "nu", delta("x", "nu"))):
            lim = ec.q_zero_limit_factor(kind, "x", second)
            out.append(_check(f"limit factor {kind} point {i}", ev.values(lim) == ev.values(atom)))
    out += _relation_records(hecke.verify_limit_consistency(datum, cfg.seed))
    for kind in ("Cq0", "Ctilde"):
        out += _relation_records(hecke.verify_relations(kind, datum, cfg.trials, cfg.seed))
    return out


RUNNERS: Dict[str, Callable[[RunConfig], List[dict]]] = {
    "table": suite_table,
    "check-recursions": suite_recursions,
    "check-hecke": suite_hecke,
    "check-weightfn": suite_weightfn,
    "check-transforms": suite_transforms,
    "check-identities": suite_identities,
    "limits": suite_limits,
}


# plumbing -----------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellischub", description="Elliptic classes of Schubert varieties.")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--group", help="root datum name (a1..a5, c2) or JSON path")
    p.add_argument("--order", type=_positive, default=4, help="q truncation order (>= 1)")
    p.add_argument("--points", type=_positive, default=3)
    p.add_argument("--seed", type=int, default=None, help=f"default $ELLISCHUB_SEED or {DEFAULT_SEED}")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--golden", help="golden table: path or packaged name like data/gl3.json")
    p.add_argument("--n", type=_positive, default=3, help="GL_n for check-weightfn")
    p.add_argument("--trials", type=_positive, default=3, help="random tuples for relation checks")
    p.add_argument("--emit", help="write the computed table as JSON (table suite)")
    return p


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    a = parser.parse_args(argv)
    seed = a.seed
    if seed is None:
        env = os.environ.get("ELLISCHUB_SEED")
        try:
            seed = int(env) if env else DEFAULT_SEED
        except ValueError:
            parser.error(f"ELLISCHUB_SEED={env!r} is not an integer")
    return RunConfig(a.suite, a.group, a.order, a.points, seed, a.format, a.golden, a.n, a.trials, a.emit)


def render(suite: str, checks: List[dict], fmt: str) -> str:
    checks = sorted(checks, key=lambda c: c["id"])
    if fmt == "json":
        return json.dumps({"suite": suite, "checks": checks}, indent=1, sort_keys=True)
    lines = [f"{c['status'].upper():7} {c['id']}" + (f"  [{c['detail']}]" if c["status"] == "fail" else "")
             for c in checks]
    counts: Dict[str, int] = {}
    for c in checks:
        counts[c["status"]] = counts.get(c["status"], 0) + 1
    lines.append(f"{suite}: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())))
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = parse_config(argv)
    try:
        checks = RUNNERS[cfg.suite](cfg)
    except (UsageError, FileNotFoundError) as exc:
        print(f"ellischub: error: {exc}", file=sys.stderr)
        return 2
    print(render(cfg.suite, checks, cfg.format))
    return 1 if any(c["status"] == "fail" for c in checks) else 0


if __name__ == "__main__":
    sys.exit(main())
