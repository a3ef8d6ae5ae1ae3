from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsk.cohomology_ring import (
    GENERATORS,
    RingElement,
    chern_report,
    degree_of_V,
    index_c1,
    rank_of_V,
    ring_eval,
    scenario,
)
from hsk.errors import DomainError

monomials = st.lists(st.sampled_from(GENERATORS), max_size=3)
coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=3)
elements = st.lists(st.tuples(monomials, coefficients), max_size=5).map(
    lambda items: sum((c * _product(m) for m, c in items), RingElement.const(0))
)


def _product(names):
    out = RingElement.const(1)
    for n in names:
        out = out * RingElement.gen(n)
    return out


@settings(max_examples=200)
@given(a=elements, b=elements, c=elements)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == RingElement.const(0)
    assert a * 1 == a


@settings(max_examples=200)
@given(a=elements)
def test_nilpotence(a):
    # every positive-degree class is nilpotent on a space of real dimension ≤ 10
    assert (a - a.degree_part(0)) ** 6 == RingElement.const(0)


def test_relations():
    t, th, pi = (RingElement.gen(g) for g in ("t", "th", "pi"))
    assert t * t == 0 and th * th == 0
    assert pi * pi == 2 * t * th
    assert pi * t == 0 and pi * th == 0
    assert pi**3 == 0


def test_parser_aliases():
    assert ring_eval("(1 + π)^2") == ring_eval("1 + 2*pi + pi**2")
    assert ring_eval("t̂·p − t∧p") == ring_eval("th*p - t*p")
    assert ring_eval("k*t/2", k=3).coefficient("t") == Fraction(3, 2)
    with pytest.raises(DomainError):
        ring_eval("q + 1")


def test_format():
    assert ring_eval("(1 + pi)**2").format() == "1 + 2π + 2 t·t̂"
    assert scenario("ch_V", 5).format() == "5 − 2t̂"
    assert scenario("ch_E_check", 5).format() == "2 − 5 t·p"
    assert RingElement.const(0).format() == "0"


@pytest.mark.parametrize("k", range(1, 11))
def test_characteristic_classes(k):
    assert scenario("ch_V", k) == ring_eval("k - 2*th", k=k)
    assert degree_of_V(k) == -2 and rank_of_V(k) == k
    assert scenario("ch_E_check", k) == ring_eval("2 - k*t*p", k=k)
    assert scenario("deg_I", k).scalar() == 0
    assert index_c1(k) == -k


def test_integration_and_degree_parts():
    e = ring_eval("3 + 2*t*p - th + 5*t*th*p")
    assert e.integrate("t", "p") == ring_eval("2 + 5*th")
    assert e.degree_part(2) == ring_eval("-th")
    assert e.degree_part(0).scalar() == 3
    with pytest.raises(DomainError):
        e.scalar()


def test_report_and_rejections():
    rep = chern_report(3)
    assert rep == {"ch_V": "3 − 2t̂", "ch_E_check": "2 − 3 t·p", "deg_I": 0,
                   "index_c1": -3, "deg_V": -2, "rank_V": 3}
    with pytest.raises(DomainError):
        scenario("ch_V", 0)
    with pytest.raises(DomainError):
        scenario("nope", 2)
