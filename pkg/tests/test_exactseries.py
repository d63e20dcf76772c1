from __future__ import annotations

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from ellischub.exactseries import (EpsSeries, EvalPoint, HalfMonomial, LatticeViolation, QSeries,
                                   UsageError, eval_monomial, lazy_points, mono, qs_invert, qs_mul)

coeff_lists = st.lists(st.integers(-20, 20), min_size=1, max_size=7)


def test_parse_and_doubled_exponents():
    m = HalfMonomial.parse("h*mu2/mu1")
    assert m.doubled("h") == 2 and m.doubled("mu1") == -2 and m.doubled("z1") == 0
    assert mono("h^1/2").doubled("h") == 1
    assert mono("z2^-2") == mono("z2").inverse() ** 2
    assert mono("1").is_one()


def test_parse_rejects_garbage():
    with pytest.raises(UsageError):
        HalfMonomial.parse("z1+z2")


def test_half_powers_rejected_where_lattice_required():
    with pytest.raises(LatticeViolation):
        mono("h^1/2").require_integral()
    assert mono("z1^2").half() == mono("z1")


@given(st.dictionaries(st.sampled_from(["z1", "z2", "mu1", "h"]), st.integers(-6, 6)),
       st.dictionaries(st.sampled_from(["z1", "z2", "mu1", "h"]), st.integers(-6, 6)))
def test_monomial_group_laws(a, b):
    x, y = HalfMonomial(a), HalfMonomial(b)
    assert (x * y) / y == x
    assert (x * x.inverse()).is_one()
    assert x * y == y * x


def _sympy_truncated_product(a, b, n):
    q = sympy.Symbol("q")
    pa = sum(c * q ** i for i, c in enumerate(a))
    pb = sum(c * q ** i for i, c in enumerate(b))
    poly = sympy.Poly(sympy.expand(pa * pb), q)
    return [poly.coeff_monomial(q ** i) for i in range(n)]


@given(coeff_lists, coeff_lists)
@settings(max_examples=50)
def test_series_product_matches_polynomial_oracle(a, b):
    n = min(len(a), len(b))
    got = qs_mul(QSeries(a[:n]), QSeries(b[:n]))
    assert [int(c) for c in got.coeffs] == _sympy_truncated_product(a[:n], b[:n], n)


@given(coeff_lists.filter(lambda c: c[0] != 0))
def test_series_inverse(a):
    s = QSeries(a)
    assert qs_mul(s, qs_invert(s)) == QSeries.constant(1, s.order)


def test_eps_series_reciprocal():
    x = EpsSeries(0, [1, 1, 0, 0, 0, 0])
    assert (x * x.reciprocal()).coefficient(0) == 1
    assert all((x * x.reciprocal()).coefficient(k) == 0 for k in range(1, 5))
    eps = EpsSeries(1, [1, 0, 0, 0])
    inv = eps.reciprocal()
    assert inv.lo == -1 and inv.coefficient(-1) == 1


def test_points_are_deterministic_squares():
    a = next(lazy_points(11))
    b = next(lazy_points(11))
    assert a.value("z1") == b.value("z1")
    s = a.sqrt_value("z1")
    assert a.value("z1") == s * s and s > 0 and s != 1
    k, d = s.numerator, s.denominator
    assert 1 <= d <= 40 and 1 <= k <= 40


def test_eval_monomial_with_half_powers():
    p = EvalPoint({"h": mpq(3, 2), "z1": 2})
    assert eval_monomial(mono("h^1/2*z1"), p) == mpq(3, 2) * 4
    with pytest.raises(UsageError):
        EvalPoint({"z1": 1})
    with pytest.raises(UsageError):
        p.value("mu1")
