from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrapencil.padic import (
    PAdicContext,
    UltraNorm,
    cmp_norm,
    floor_log_p,
    format_rational,
    largest_ppow_below,
    padic_abs,
    parse_rational,
    valuation,
)

CTX5 = PAdicContext(5)

rationals = st.fractions(
    min_value=-10**6, max_value=10**6, max_denominator=10**6
)
primes = st.sampled_from([2, 3, 5, 7])


def test_context_rejects_composites():
    with pytest.raises(ValueError):
        PAdicContext(6)
    with pytest.raises(ValueError):
        PAdicContext(1)
    PAdicContext(2)


def test_valuation_examples():
    assert valuation(F(50), CTX5) == 2
    assert valuation(F(0), CTX5) is None
    assert valuation(F(3, 25), CTX5) == -2


def test_abs_examples():
    assert padic_abs(F(50), CTX5) == UltraNorm.ppow(2)
    assert padic_abs(F(1), CTX5) == UltraNorm.ppow(0)
    assert padic_abs(F(1, 5), CTX5) == UltraNorm.ppow(-1)
    assert padic_abs(F(0), CTX5).is_zero


def test_exact_rational_arithmetic():
    assert F(1, 5) + F(2, 5) == F(3, 5)
    assert F(5) * F(1, 5) == 1
    with pytest.raises(ZeroDivisionError):
        F(1) / F(0)


def test_cmp_norm_examples():
    assert cmp_norm(UltraNorm.ppow(-1), F(3), CTX5) > 0
    assert cmp_norm(UltraNorm.zero(), F(1, 100), CTX5) < 0
    assert cmp_norm(UltraNorm.ppow(2), F(1, 25), CTX5) == 0
    assert cmp_norm(UltraNorm.infinity(), F(10**9), CTX5) > 0


def test_norm_total_order():
    zero = UltraNorm.zero()
    inf = UltraNorm.infinity()
    assert zero < UltraNorm.ppow(100) < UltraNorm.ppow(-3) < inf
    assert max(zero, inf, UltraNorm.ppow(0)) == inf


def test_norm_multiplication():
    assert UltraNorm.ppow(1) * UltraNorm.ppow(2) == UltraNorm.ppow(3)
    assert UltraNorm.zero() * UltraNorm.infinity() == UltraNorm.zero()
    assert UltraNorm.infinity() * UltraNorm.ppow(-4) == UltraNorm.infinity()
    assert UltraNorm.ppow(2) / UltraNorm.ppow(5) == UltraNorm.ppow(-3)


@settings(max_examples=200)
@given(x=rationals, y=rationals, p=primes)
def test_ultrametric_inequality(x, y, p):
    ctx = PAdicContext(p)
    ax, ay = padic_abs(x, ctx), padic_abs(y, ctx)
    s = padic_abs(x + y, ctx)
    assert s <= max(ax, ay)
    if ax != ay:
        assert s == max(ax, ay)


@settings(max_examples=200)
@given(x=rationals, y=rationals, p=primes)
def test_multiplicativity(x, y, p):
    ctx = PAdicContext(p)
    assert padic_abs(x * y, ctx) == padic_abs(x, ctx) * padic_abs(y, ctx)


@given(x=rationals, p=primes)
def test_nondegeneracy(x, p):
    ctx = PAdicContext(p)
    assert padic_abs(x, ctx).is_zero == (x == 0)


@given(v1=st.integers(-20, 20), v2=st.integers(-20, 20), v3=st.integers(-20, 20))
def test_norm_monoid(v1, v2, v3):
    a, b, c = (UltraNorm.ppow(v) for v in (v1, v2, v3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * UltraNorm.one() == a


@given(q=st.fractions(min_value=F(1, 10**6), max_value=10**6), p=primes)
def test_floor_log_p(q, p):
    e = floor_log_p(q, p)
    assert F(p) ** e <= q < F(p) ** (e + 1)


@given(q=st.fractions(min_value=F(1, 10**6), max_value=10**6), p=primes)
def test_largest_ppow_below_is_strict(q, p):
    v = largest_ppow_below(q, p)
    assert F(p) ** (-v) < q <= F(p) ** (-v + 1)


def test_rational_serialization_roundtrip():
    for s in ["-3/25", "7/1", "0/1"]:
        assert format_rational(parse_rational(s)) == s
    assert parse_rational("4") == F(4)


def test_norm_json_roundtrip():
    for n in [UltraNorm.zero(), UltraNorm.infinity(), UltraNorm.ppow(-7)]:
        assert UltraNorm.from_json(n.to_json()) == n
