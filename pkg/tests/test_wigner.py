from fractions import Fraction
from itertools import product

import pytest

from su2net.exact import HalfInt, SurdSum, format_surd, half, surd_from
from su2net.wigner import (
    CACHE_HEADER,
    _sixj_eval,
    clear_sixj_cache,
    clebsch_gordan,
    load_sixj_cache,
    pi_factor,
    save_sixj_cache,
    sixj_cache_info,
    sixj_key,
    triangle,
    wigner_3j,
    wigner_6j,
)

h = HalfInt.parse


def test_triangle():
    assert triangle(h("1/2"), h("1/2"), 1)
    assert not triangle(h("1/2"), 0, 1)
    assert not triangle(1, 1, h("1/2"))
    assert triangle(0, 0, 0)
    with pytest.raises(ValueError):
        triangle(-1, 0, 1)


def test_pi_factor():
    assert pi_factor([h("1/2")] * 4) == 4
    assert pi_factor([1, 1]) == 3
    assert pi_factor([]) == 1


def test_known_3j_and_cg():
    assert format_surd(wigner_3j(h("1/2"), h("1/2"), 0, h("1/2"), h("-1/2"), 0)) == "1/2*sqrt(2)"
    assert format_surd(wigner_3j(h("1/2"), h("1/2"), 1, h("1/2"), h("-1/2"), 0)) == "1/6*sqrt(6)"
    assert format_surd(clebsch_gordan(h("1/2"), h("1/2"), h("1/2"), h("-1/2"), 0, 0)) == "1/2*sqrt(2)"
    assert clebsch_gordan(1, 1, 1, 1, 2, 2) == 1
    assert wigner_3j(1, 1, 1, 0, 0, 0) == 0  # odd J with all m = 0
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0  # not a triangle


def test_3j_parity_mismatch_is_an_error():
    with pytest.raises(ValueError):
        wigner_3j(h("1/2"), h("1/2"), 0, 0, 0, 0)


def test_known_6j():
    assert wigner_6j(0, 0, 0, 0, 0, 0) == 1
    assert wigner_6j(h("1/2"), h("1/2"), 0, h("1/2"), h("1/2"), 0) == Fraction(-1, 2)
    assert wigner_6j(h("1/2"), h("1/2"), 1, h("1/2"), h("1/2"), 1) == Fraction(1, 6)
    assert wigner_6j(1, 1, 1, 1, 1, 1) == Fraction(1, 6)
    assert wigner_6j(1, 1, 3, 1, 1, 1) == 0
    with pytest.raises(ValueError):
        wigner_6j(-1, 0, 1, 0, 0, 0)


def test_6j_large_arguments_are_exact():
    # Racah sum with large factorials, checked against an independent closed form:
    # {a b c; 0 c b} = (-1)^(a+b+c) / sqrt((2b+1)(2c+1))
    a, b, c = 30, 25, 40
    v = wigner_6j(a, b, c, 0, c, b)
    assert v == surd_from((-1) ** (a + b + c), Fraction(1, (2 * b + 1) * (2 * c + 1)))


def test_sixj_key_is_orbit_invariant():
    args = (1, 2, 3, 2, 1, 3)
    k = sixj_key(*args)
    a, b, c, d, e, f = args
    assert sixj_key(b, a, c, e, d, f) == k
    assert sixj_key(d, e, c, a, b, f) == k
    assert sixj_key(a, e, f, d, b, c) == k


def test_cache_round_trip(tmp_path):
    clear_sixj_cache()
    for t in product(range(3), repeat=6):
        wigner_6j(*(HalfInt(x) for x in t))
    n = sixj_cache_info()
    path = tmp_path / "c.txt"
    assert save_sixj_cache(path) == n
    text = path.read_text()
    assert text.startswith(CACHE_HEADER + "\n")
    clear_sixj_cache()
    assert load_sixj_cache(path, verify=True) == n
    assert sixj_cache_info() == n


def test_cache_rejects_corruption(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("not a header\n")
    with pytest.raises(ValueError, match="header"):
        load_sixj_cache(p)
    p.write_text(CACHE_HEADER + "\n0,0,0,0,0,0\t1\n1,1,0,1,1,0\tgarbage\n")
    with pytest.raises(ValueError, match=":3"):
        load_sixj_cache(p)
    p.write_text(CACHE_HEADER + "\n0,0,0,0,0,0\t2\n")
    with pytest.raises(ValueError, match="disagrees"):
        load_sixj_cache(p, verify=True)
    p.write_text(CACHE_HEADER + "\n1,1,0,0,0,0\t1\n")
    with pytest.raises(ValueError, match="canonical"):
        load_sixj_cache(p)


def test_parallel_memo_is_consistent():
    from concurrent.futures import ThreadPoolExecutor

    clear_sixj_cache()
    tuples = [t for t in product(range(4), repeat=6)]
    with ThreadPoolExecutor(4) as ex:
        got = list(ex.map(lambda t: wigner_6j(*(HalfInt(x) for x in t)), tuples))
    for t, v in zip(tuples, got):
        assert v == _sixj_eval(*sixj_key(*t))
