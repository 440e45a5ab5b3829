"""Exact arithmetic: half-integers, prime-factored factorials and sums of surds.

Every value the library produces is a finite sum  c_1*sqrt(k_1) + ... + c_n*sqrt(k_n)
with rational c_i and distinct square-free k_i.  Such sums form a ring, and two of
them are equal exactly when their (kernel -> coefficient) maps are equal, so identity
residuals can be decided without any tolerance.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

__all__ = [
    "HalfInt",
    "half",
    "FactoredInt",
    "factorial_factored",
    "set_factorial_limit",
    "SurdSum",
    "surd_from",
    "surd_add",
    "surd_mul",
    "surd_eq",
    "surd_to_float",
    "parse_surd",
    "squarefree_split",
]

Rational = Union[int, Fraction]


# ---------------------------------------------------------------- half-integers

@dataclass(frozen=True, order=True)
class HalfInt:
    """An angular momentum or projection, stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise TypeError("HalfInt.twice must be an int")

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other):
        return HalfInt(self.twice + half(other).twice)

    def __sub__(self, other):
        return HalfInt(self.twice - half(other).twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __abs__(self):
        return HalfInt(abs(self.twice))

    def __float__(self):
        return self.twice / 2

    def __str__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt({self})"

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Read ``3/2``, ``1``, ``-1/2`` or ``0.5``."""
        text = text.strip()
        try:
            v = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a spin value: {text!r}") from None
        tw = 2 * v
        if tw.denominator != 1:
            raise ValueError(f"not a multiple of 1/2: {text!r}")
        return cls(int(tw))


def half(x) -> HalfInt:
    """Coerce ``x`` to a HalfInt.

    ints, Fractions and floats are read as the value itself (so ``half(1)`` is spin 1),
    strings go through :meth:`HalfInt.parse`.
    """
    if isinstance(x, HalfInt):
        return x
    if isinstance(x, str):
        return HalfInt.parse(x)
    if isinstance(x, bool):
        raise TypeError("bool is not a spin")
    if isinstance(x, int):
        return HalfInt(2 * x)
    if isinstance(x, (Fraction, float)):
        tw = 2 * Fraction(x)
        if tw.denominator != 1:
            raise ValueError(f"not a multiple of 1/2: {x!r}")
        return HalfInt(int(tw))
    raise TypeError(f"cannot read {type(x).__name__} as a half-integer")


# ------------------------------------------------------------ factored integers

def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(limit ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, f in enumerate(sieve) if f]


class FactoredInt:
    """A positive rational held as a prime -> exponent map."""

    __slots__ = ("_exp",)

    def __init__(self, exponents: Mapping[int, int] | None = None):
        self._exp = {p: e for p, e in (exponents or {}).items() if e}

    @property
    def exponents(self) -> Mapping[int, int]:
        return MappingProxyType(self._exp)

    def __mul__(self, other: "FactoredInt") -> "FactoredInt":
        out = dict(self._exp)
        for p, e in other._exp.items():
            out[p] = out.get(p, 0) + e
        return FactoredInt(out)

    def __truediv__(self, other: "FactoredInt") -> "FactoredInt":
        out = dict(self._exp)
        for p, e in other._exp.items():
            out[p] = out.get(p, 0) - e
        return FactoredInt(out)

    def __eq__(self, other):
        return isinstance(other, FactoredInt) and self._exp == other._exp

    def __hash__(self):
        return hash(frozenset(self._exp.items()))

    def __repr__(self):
        return f"FactoredInt({dict(sorted(self._exp.items()))})"

    def to_fraction(self) -> Fraction:
        num = den = 1
        for p, e in self._exp.items():
            if e > 0:
                num *= p ** e
            else:
                den *= p ** (-e)
        return Fraction(num, den)

    def sqrt_parts(self) -> tuple[Fraction, int]:
        """Split sqrt(self) as (rational, square-free kernel)."""
        num = den = 1
        kernel = 1
        for p, e in self._exp.items():
            if e % 2:
                # p^e = p^(e+1) / p and sqrt(1/p) = sqrt(p)/p
                kernel *= p
                e += 1
                den *= p
            h = e // 2
            if h > 0:
                num *= p ** h
            elif h < 0:
                den *= p ** (-h)
        return Fraction(num, den), kernel


_FACT_LOCK = threading.Lock()
_FACT_TABLE: list[FactoredInt] = [FactoredInt()]
_FACT_LIMIT = 512
_PRIMES = _small_primes(_FACT_LIMIT)


def set_factorial_limit(n: int) -> None:
    """Raise or lower the largest n accepted by :func:`factorial_factored`."""
    global _FACT_LIMIT, _PRIMES
    with _FACT_LOCK:
        _FACT_LIMIT = int(n)
        if _PRIMES[-1] < n:
            _PRIMES = _small_primes(max(n, 2))


def _factor_small(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in _PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def factorial_factored(n: int) -> FactoredInt:
    """n! as a prime-exponent map (memoized, table grows monotonically)."""
    if n < 0:
        raise ValueError("factorial of a negative number")
    if n > _FACT_LIMIT:
        raise OverflowError(
            f"factorial argument {n} exceeds the configured limit {_FACT_LIMIT}"
        )
    table = _FACT_TABLE
    if n < len(table):
        return table[n]
    with _FACT_LOCK:
        while len(table) <= n:
            k = len(table)
            table.append(table[-1] * FactoredInt(_factor_small(k)))
    return table[n]


# ------------------------------------------------------------------ square-free

def squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, k) with n = s*s*k and k square-free."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0, 1
    s = k = 1
    m = n
    p = 2
    # after removing every prime up to cbrt(m), what is left has at most two
    # prime factors, so it is either a perfect square or square-free
    while p * p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                k *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(m)
    if r * r == m:
        s *= r
    else:
        k *= m
    return s, k


# ------------------------------------------------------------------- surd sums

class SurdSum:
    """Exact sum of rational multiples of square roots of square-free integers."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | None = None):
        t = {}
        for k, c in (terms or {}).items():
            if c:
                t[int(k)] = Fraction(c)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "SurdSum":
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, c: Rational) -> "SurdSum":
        return cls._raw({1: Fraction(c)} if c else {})

    @classmethod
    def term(cls, c: Rational, kernel: int) -> "SurdSum":
        """c*sqrt(kernel); the caller guarantees kernel is square-free."""
        return cls._raw({kernel: Fraction(c)} if c else {})

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return MappingProxyType(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_single(self) -> bool:
        return len(self._t) <= 1

    def single(self) -> tuple[Fraction, int]:
        """(c, k) for a one-term value; zero gives (0, 1)."""
        if not self._t:
            return Fraction(0), 1
        if len(self._t) != 1:
            raise ValueError("value has more than one surd term")
        (k, c), = self._t.items()
        return c, k

    def __add__(self, other):
        other = _as_surd(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for k, c in other._t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return SurdSum._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return SurdSum._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = _as_surd(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_surd(other)
        if other is NotImplemented:
            return other
        if not self._t or not other._t:
            return SurdSum._raw({})
        t: dict[int, Fraction] = {}
        for k1, c1 in self._t.items():
            for k2, c2 in other._t.items():
                if k1 == 1:
                    k, c = k2, c1 * c2
                elif k2 == 1:
                    k, c = k1, c1 * c2
                elif k1 == k2:
                    k, c = 1, c1 * c2 * k1
                else:
                    g = math.gcd(k1, k2)
                    k, c = (k1 // g) * (k2 // g), c1 * c2 * g
                v = t.get(k, 0) + c
                if v:
                    t[k] = v
                else:
                    t.pop(k, None)
        return SurdSum._raw(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a rational or by a single-term surd."""
        other = _as_surd(other)
        if other is NotImplemented:
            return other
        c, k = other.single()
        if not c:
            raise ZeroDivisionError("division by zero surd")
        # 1/(c sqrt k) = sqrt(k) / (c k)
        return self * SurdSum._raw({k: 1 / (c * k)})

    def __eq__(self, other):
        other = _as_surd(other)
        if other is NotImplemented:
            return False
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __float__(self):
        return surd_to_float(self)

    def __str__(self):
        return format_surd(self)

    def __repr__(self):
        return f"SurdSum({format_surd(self)!r})"

    def sign(self) -> int:
        """Exact sign for single-term values; multi-term values use a float check."""
        if not self._t:
            return 0
        if len(self._t) == 1:
            (c,) = self._t.values()
            return 1 if c > 0 else -1
        f = surd_to_float(self)
        if f == 0:
            raise ArithmeticError("sign of a multi-term surd sum is not resolved in double precision")
        return 1 if f > 0 else -1


def _as_surd(x):
    if isinstance(x, SurdSum):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return SurdSum.rational(x)
    return NotImplemented


def surd_from(coeff: Rational, radicand: Rational) -> SurdSum:
    """Canonical form of coeff*sqrt(radicand)."""
    coeff = Fraction(coeff)
    radicand = Fraction(radicand)
    if radicand < 0:
        raise ValueError("negative radicand")
    if not coeff or not radicand:
        return SurdSum()
    # sqrt(p/q) = sqrt(p*q)/q
    s, k = squarefree_split(radicand.numerator * radicand.denominator)
    return SurdSum._raw({k: coeff * s / radicand.denominator})


def surd_add(a: SurdSum, b: SurdSum) -> SurdSum:
    return a + b


def surd_mul(a: SurdSum, b: SurdSum) -> SurdSum:
    return a * b


def surd_eq(a: SurdSum, b: SurdSum) -> bool:
    return a == b


def surd_to_float(a: SurdSum) -> float:
    """Double-precision value; diagnostic only."""
    total = math.fsum(float(c) * math.sqrt(k) for k, c in a._t.items())
    return total


# ----------------------------------------------------------------- text format

def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_surd(a: SurdSum) -> str:
    """``-1/2``, ``1/3*sqrt(6)``, ``1+2*sqrt(3)``, ``0``."""
    if not a._t:
        return "0"
    out = []
    for k in sorted(a._t):
        c = a._t[k]
        body = _fmt_rational(abs(c)) if k == 1 else f"{_fmt_rational(abs(c))}*sqrt({k})"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("-" if c < 0 else "+") + body)
    return "".join(out)


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+)(?:\s*/\s*(\d+))?\s*(?:\*\s*sqrt\(\s*(\d+)\s*\))?|sqrt\(\s*(\d+)\s*\))\s*"
)


def parse_surd(text: str) -> SurdSum:
    """Inverse of :func:`format_surd`; also accepts non-canonical radicands."""
    s = text.strip()
    if not s:
        raise ValueError("empty surd string")
    pos = 0
    total = SurdSum()
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse surd: {text!r}")
        sign, num, den, rad, bare = m.groups()
        if sign is None and not first:
            raise ValueError(f"cannot parse surd: {text!r}")
        if bare is not None:
            c, r = Fraction(1), int(bare)
        else:
            c = Fraction(int(num), int(den) if den else 1)
            r = int(rad) if rad else 1
        if sign == "-":
            c = -c
        total = total + surd_from(c, r)
        pos = m.end()
        first = False
    return total


def sum_surds(values: Iterable[SurdSum]) -> SurdSum:
    """Accumulate many values with one dict instead of a chain of copies."""
    t: dict[int, Fraction] = {}
    for v in values:
        for k, c in v._t.items():
            t[k] = t.get(k, 0) + c
    return SurdSum._raw({k: c for k, c in t.items() if c})
