"""Triangle rule, Pi factors, 3j, Clebsch-Gordan and 6j symbols in exact arithmetic.

Public functions take anything :func:`su2net.exact.half` understands.  The
underscore variants take twice-values as plain ints and are what the rest of the
package calls in its inner loops.

Conventions are Condon-Shortley throughout.  3j and 6j use the Racah single-sum
forms; the square-root prefactors are assembled from prime-factored factorials so
the square-free kernel comes out without factoring large integers.
"""

from __future__ import annotations

import math
import os
import threading
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Sequence

from .exact import (
    FactoredInt,
    SurdSum,
    factorial_factored,
    format_surd,
    half,
    parse_surd,
    surd_from,
)

__all__ = [
    "triangle",
    "pi_factor",
    "wigner_3j",
    "clebsch_gordan",
    "wigner_6j",
    "sixj_key",
    "sixj_cache_info",
    "clear_sixj_cache",
    "save_sixj_cache",
    "load_sixj_cache",
    "CACHE_HEADER",
]

CACHE_HEADER = "# su2net sixj cache v1"

_ff = factorial_factored


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _sign(tw: int) -> int:
    """(-1)^(tw/2) for an even twice-exponent."""
    if tw % 2:
        raise ValueError("phase exponent is not an integer")
    return -1 if (tw // 2) % 2 else 1


def _tri(a: int, b: int, c: int) -> bool:
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def triangle(a, b, c) -> bool:
    """True when (a, b, c) can couple to zero: triangle inequalities and integer perimeter."""
    a, b, c = half(a).twice, half(b).twice, half(c).twice
    if min(a, b, c) < 0:
        raise ValueError("spins must be non-negative")
    return _tri(a, b, c)


def _pi2(*tws: int) -> int:
    r = 1
    for t in tws:
        r *= t + 1
    return r


def pi_factor(js: Sequence) -> SurdSum:
    """sqrt(prod(2j+1))."""
    tws = [half(j).twice for j in js]
    if any(t < 0 for t in tws):
        raise ValueError("spins must be non-negative")
    return surd_from(1, _pi2(*tws))


def _delta(a: int, b: int, c: int) -> FactoredInt:
    return (
        _ff((a + b - c) // 2) * _ff((a - b + c) // 2) * _ff((-a + b + c) // 2)
    ) / _ff((a + b + c) // 2 + 1)


# ------------------------------------------------------------------------- 3j

def _threej(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> SurdSum:
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if j < 0:
            raise ValueError("spins must be non-negative")
        if (j - m) % 2:
            raise ValueError(f"projection {m}/2 does not match spin {j}/2 in parity")
    if m1 + m2 + m3 != 0 or not _tri(j1, j2, j3):
        return SurdSum()
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return SurdSum()
    rad = _delta(j1, j2, j3)
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        rad = rad * _ff((j + m) // 2) * _ff((j - m) // 2)
    r, kernel = rad.sqrt_parts()
    A = (j3 - j2 + m1) // 2
    B = (j3 - j1 - m2) // 2
    C = (j1 + j2 - j3) // 2
    D = (j1 - m1) // 2
    E = (j2 + m2) // 2
    total = Fraction(0)
    for k in range(max(0, -A, -B), min(C, D, E) + 1):
        den = _fact(k) * _fact(A + k) * _fact(B + k) * _fact(C - k) * _fact(D - k) * _fact(E - k)
        total += Fraction(-1 if k % 2 else 1, den)
    return SurdSum.term(_sign(j1 - j2 - m3) * r * total, kernel)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> SurdSum:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3)."""
    return _threej(*(half(x).twice for x in (j1, j2, j3, m1, m2, m3)))


def _cg(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> SurdSum:
    if m1 + m2 != M:
        for j, m in ((j1, m1), (j2, m2), (J, M)):
            if (j - m) % 2:
                raise ValueError(f"projection {m}/2 does not match spin {j}/2 in parity")
        return SurdSum()
    v = _threej(j1, j2, J, m1, m2, -M)
    if not v:
        return v
    return v * surd_from(_sign(j1 - j2 + M), J + 1)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> SurdSum:
    """<j1 m1; j2 m2 | J M>."""
    return _cg(*(half(x).twice for x in (j1, m1, j2, m2, J, M)))


# ------------------------------------------------------------------------- 6j

# the 24 symmetries: any column permutation, combined with swapping upper and
# lower entries in two of the three columns (or in none)
_FLIPS = ((), (0, 1), (0, 2), (1, 2))
_COL_PERMS = tuple(permutations(range(3)))


def sixj_key(a: int, b: int, c: int, d: int, e: int, f: int) -> tuple:
    """Canonical representative of the symmetry orbit of {a b c; d e f} (twice-values)."""
    cols = ((a, d), (b, e), (c, f))
    best = None
    for flip in _FLIPS:
        fc = [(lo, up) if i in flip else (up, lo) for i, (up, lo) in enumerate(cols)]
        for p in _COL_PERMS:
            t = (fc[p[0]][0], fc[p[1]][0], fc[p[2]][0], fc[p[0]][1], fc[p[1]][1], fc[p[2]][1])
            if best is None or t < best:
                best = t
    return best


_SIXJ: dict[tuple, SurdSum] = {}
_SIXJ_LOCK = threading.Lock()
_ZERO = SurdSum()


def _sixj_eval(a: int, b: int, c: int, d: int, e: int, f: int) -> SurdSum:
    if not (_tri(a, b, c) and _tri(a, e, f) and _tri(d, b, f) and _tri(d, e, c)):
        return _ZERO
    r, kernel = (_delta(a, b, c) * _delta(a, e, f) * _delta(d, b, f) * _delta(d, e, c)).sqrt_parts()
    a1 = (a + b + c) // 2
    a2 = (a + e + f) // 2
    a3 = (d + b + f) // 2
    a4 = (d + e + c) // 2
    b1 = (a + b + d + e) // 2
    b2 = (a + c + d + f) // 2
    b3 = (b + c + e + f) // 2
    total = Fraction(0)
    for t in range(max(a1, a2, a3, a4), min(b1, b2, b3) + 1):
        den = (
            _fact(t - a1) * _fact(t - a2) * _fact(t - a3) * _fact(t - a4)
            * _fact(b1 - t) * _fact(b2 - t) * _fact(b3 - t)
        )
        total += Fraction(-_fact(t + 1) if t % 2 else _fact(t + 1), den)
    return SurdSum.term(r * total, kernel)


def _sixj(a: int, b: int, c: int, d: int, e: int, f: int) -> SurdSum:
    raw = (a, b, c, d, e, f)
    v = _SIXJ.get(raw)
    if v is not None:
        return v
    if min(raw) < 0:
        raise ValueError("spins must be non-negative")
    key = sixj_key(*raw)
    v = _SIXJ.get(key)
    if v is None:
        v = _sixj_eval(*key)
    with _SIXJ_LOCK:
        _SIXJ[key] = v
        _SIXJ[raw] = v
    return v


def wigner_6j(j1, j2, j3, j4, j5, j6) -> SurdSum:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _sixj(*(half(x).twice for x in (j1, j2, j3, j4, j5, j6)))


def sixj_cache_info() -> int:
    """Number of canonical orbits currently memoized."""
    return sum(1 for k in list(_SIXJ) if sixj_key(*k) == k)


def clear_sixj_cache() -> None:
    with _SIXJ_LOCK:
        _SIXJ.clear()


def save_sixj_cache(path: str | os.PathLike) -> int:
    """Write the canonical entries of the memo table; returns how many were written."""
    with _SIXJ_LOCK:
        items = sorted((k, v) for k, v in _SIXJ.items() if sixj_key(*k) == k)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(CACHE_HEADER + "\n")
        for k, v in items:
            fh.write(",".join(map(str, k)) + "\t" + format_surd(v) + "\n")
    return len(items)


def load_sixj_cache(path: str | os.PathLike, verify: bool = False) -> int:
    """Merge a cache file into the memo table.

    With ``verify`` every entry is recomputed and a mismatch raises ValueError.
    """
    n = 0
    with open(path, encoding="ascii") as fh:
        head = fh.readline().rstrip("\n")
        if head != CACHE_HEADER:
            raise ValueError(f"{path}: not a 6j cache file (bad header {head!r})")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                key_s, val_s = line.split("\t")
                key = tuple(int(x) for x in key_s.split(","))
                if len(key) != 6:
                    raise ValueError("key needs six entries")
                val = parse_surd(val_s)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: corrupt entry ({exc})") from None
            if sixj_key(*key) != key:
                raise ValueError(f"{path}:{lineno}: key is not canonical")
            if verify and _sixj_eval(*key) != val:
                raise ValueError(f"{path}:{lineno}: stored value disagrees with recomputation")
            with _SIXJ_LOCK:
                _SIXJ[key] = val
            n += 1
    return n
