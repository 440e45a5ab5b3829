from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from su2net.exact import (
    FactoredInt,
    HalfInt,
    SurdSum,
    factorial_factored,
    format_surd,
    half,
    parse_surd,
    set_factorial_limit,
    squarefree_split,
    surd_from,
)


def test_halfint_parse_and_format():
    assert HalfInt.parse("3/2").twice == 3
    assert HalfInt.parse("2").twice == 4
    assert HalfInt.parse("0.5").twice == 1
    assert str(HalfInt(3)) == "3/2"
    assert str(HalfInt(4)) == "2"
    assert str(HalfInt(-1)) == "-1/2"
    with pytest.raises(ValueError):
        HalfInt.parse("1/3")
    with pytest.raises(ValueError):
        HalfInt.parse("abc")


def test_half_reads_ints_as_spin_values():
    assert half(1).twice == 2
    assert half(Fraction(3, 2)).twice == 3
    assert half("5/2").twice == 5
    with pytest.raises(TypeError):
        half(True)


def test_factorial_factored_matches_math():
    assert factorial_factored(10).exponents == {2: 8, 3: 4, 5: 2, 7: 1}
    assert factorial_factored(0).to_fraction() == 1
    import math

    for n in (1, 5, 17, 40):
        assert factorial_factored(n).to_fraction() == math.factorial(n)


def test_factorial_limit():
    set_factorial_limit(20)
    try:
        with pytest.raises(OverflowError):
            factorial_factored(21)
    finally:
        set_factorial_limit(512)
    assert factorial_factored(21).to_fraction() > 0


def test_sqrt_parts():
    r, k = (factorial_factored(5) / factorial_factored(2)).sqrt_parts()
    # sqrt(60) = 2 sqrt(15)
    assert (r, k) == (2, 15)
    r, k = FactoredInt({2: -1}).sqrt_parts()
    assert (r, k) == (Fraction(1, 2), 2)


@pytest.mark.parametrize("n,expect", [(0, (0, 1)), (1, (1, 1)), (12, (2, 3)), (72, (6, 2)),
                                      (49 * 13, (7, 13)), (10007 ** 2 * 6, (10007, 6))])
def test_squarefree_split(n, expect):
    assert squarefree_split(n) == expect


@given(st.integers(min_value=1, max_value=10 ** 9))
def test_squarefree_split_property(n):
    s, k = squarefree_split(n)
    assert s * s * k == n
    for p in range(2, 200):
        assert k % (p * p) != 0


def test_surd_from_canonical():
    assert format_surd(surd_from(Fraction(1, 2), 8)) == "1*sqrt(2)"
    assert surd_from(3, Fraction(4, 9)) == 2
    assert format_surd(surd_from(1, Fraction(1, 6))) == "1/6*sqrt(6)"
    assert surd_from(0, 5) == 0
    with pytest.raises(ValueError):
        surd_from(1, -2)


def test_format_and_parse():
    v = SurdSum.rational(Fraction(-1, 2)) + surd_from(1, 3) * 2
    assert format_surd(v) == "-1/2+2*sqrt(3)"
    assert parse_surd("-1/2+2*sqrt(3)") == v
    assert parse_surd("sqrt(8)") == surd_from(2, 2)
    assert format_surd(SurdSum()) == "0"
    for bad in ("", "1/2*", "sqrt(x)", "1 2"):
        with pytest.raises(ValueError):
            parse_surd(bad)


def test_division_and_residual_examples():
    a = surd_from(1, 2)
    assert a / a == 1
    assert (SurdSum.rational(Fraction(1, 2)) + surd_from(1, 3)) - surd_from(1, 3) == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        a / SurdSum()


kernels = st.sampled_from([1, 2, 3, 5, 6, 7, 10, 15, 30])
fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
surds = st.lists(st.tuples(fractions, kernels), max_size=4).map(
    lambda ts: sum((surd_from(c, k) for c, k in ts), SurdSum())
)


@given(surds, surds, surds)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    assert a * 1 == a


@given(surds)
def test_text_round_trip(a):
    assert parse_surd(format_surd(a)) == a


@given(surds)
def test_float_agrees(a):
    import math

    expect = sum(float(c) * math.sqrt(k) for k, c in a.terms.items())
    assert math.isclose(float(a), expect, rel_tol=1e-12, abs_tol=1e-12)
