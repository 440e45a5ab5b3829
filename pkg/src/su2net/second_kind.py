"""3nj symbols of the second kind in chain form.

A bracket with rows ``top``, ``mid``, ``bottom`` of length n is

    sum_x (2x+1) (-1)^(R + n x) prod_i { top_i  bottom_i  x ; bottom_{i+1}  top_{i+1}  mid_i }

with indices taken mod n and R the sum of all 3n entries.  For n = 3 this is the
usual expansion of the 9j symbol of the second kind in 6j symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact import HalfInt, SurdSum, half, sum_surds
from .wigner import _sign, _sixj, _tri

__all__ = ["SecondKindBracket", "second_kind", "single_x_reduction", "x_window"]


@dataclass(frozen=True)
class SecondKindBracket:
    top: tuple[HalfInt, ...]
    mid: tuple[HalfInt, ...]
    bottom: tuple[HalfInt, ...]

    def __init__(self, top: Sequence, mid: Sequence, bottom: Sequence):
        t = tuple(half(x) for x in top)
        m = tuple(half(x) for x in mid)
        b = tuple(half(x) for x in bottom)
        if not (len(t) == len(m) == len(b)):
            raise ValueError(
                f"bracket rows have different lengths ({len(t)}, {len(m)}, {len(b)})"
            )
        if len(t) < 3:
            raise ValueError("a second-kind bracket needs at least three columns")
        if any(x.twice < 0 for x in t + m + b):
            raise ValueError("spins must be non-negative")
        object.__setattr__(self, "top", t)
        object.__setattr__(self, "mid", m)
        object.__setattr__(self, "bottom", b)

    @property
    def n(self) -> int:
        return len(self.top)

    def twice_rows(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (
            tuple(x.twice for x in self.top),
            tuple(x.twice for x in self.mid),
            tuple(x.twice for x in self.bottom),
        )

    def __str__(self):
        f = lambda row: " ".join(str(x) for x in row)
        return f"[{f(self.top)} / {f(self.mid)} / {f(self.bottom)}]"


def x_window(top: Sequence[int], bottom: Sequence[int]) -> range:
    """Twice-values of x allowed by every (top_i, bottom_i, x) triad."""
    lo = max(abs(t - b) for t, b in zip(top, bottom))
    hi = min(t + b for t, b in zip(top, bottom))
    parities = {(t + b) % 2 for t, b in zip(top, bottom)}
    if len(parities) != 1 or lo > hi:
        return range(0)
    return range(lo, hi + 1, 2)


def _chain_term(top, mid, bot, x: int) -> SurdSum:
    n = len(top)
    prod = None
    for i in range(n):
        j = (i + 1) % n
        v = _sixj(top[i], bot[i], x, bot[j], top[j], mid[i])
        if not v:
            return v
        prod = v if prod is None else prod * v
    R = sum(top) + sum(mid) + sum(bot)
    return prod * ((x + 1) * _sign(R + n * x))


def _second_kind_tw(top, mid, bot) -> SurdSum:
    return sum_surds(_chain_term(top, mid, bot, x) for x in x_window(top, bot))


def _single_x_tw(top, mid, bot, s: int) -> SurdSum:
    for t, b in zip(top, bot):
        if not _tri(t, b, s):
            raise ValueError(
                f"single-x reduction needs every (top_i, bottom_i, s) to be a triangle; "
                f"({t}/2, {b}/2, {s}/2) is not"
            )
    return _chain_term(top, mid, bot, s)


def second_kind(bracket: SecondKindBracket) -> SurdSum:
    """Full x-sum value of the bracket."""
    return _second_kind_tw(*bracket.twice_rows())


def single_x_reduction(bracket: SecondKindBracket, s) -> SurdSum:
    """The x = s term of the chain sum alone."""
    return _single_x_tw(*bracket.twice_rows(), half(s).twice)
