"""Matrix elements of Wilson loops and lines between spin-network states.

A loop acts as a ladder operator: each link it traverses moves from j to k with
|j - k| <= s <= j + k, every other spin is untouched.  The matrix element is a
cyclic product of 6j symbols, one per traversed vertex,

    M = deltas * sigma * Pi(j_l, k_l) / (2s+1) * prod_i { j_i k_i s ; k_{i+1} j_{i+1} sp_i }

where sp_i is the untouched spin at the vertex between links i and i+1.  The sign
sigma depends on the vertex coupling order and link orientation of the basis; the
per-loop rules below are pinned against the m-contraction oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exact import HalfInt, SurdSum, half, surd_from
from .lattices import (
    LatticeGraph,
    SpinAssignment,
    TopologicalSector,
    _admissible_tw,
    build_lattice,
    lattice_kind,
)
from .second_kind import SecondKindBracket
from .wigner import _sign, _sixj, _tri

__all__ = [
    "LoopSpec",
    "MatrixElementResult",
    "LOOPS",
    "get_loop",
    "matrix_element",
    "bracket_form",
    "overlap",
    "loop_window",
    "sector_eigenvalue",
]


@dataclass(frozen=True)
class LoopSpec:
    name: str
    lattice: str
    chain: tuple[tuple[str, str], ...]  # (changed link, spectator at the vertex after it)
    # sign rule: sum of coupling-triad spins of J and of K at the listed couplings,
    # plus 2j parities and (j + k + s) terms on the listed links
    sign_j: tuple[str, ...] = ()
    sign_k: tuple[str, ...] = ()
    sign_2j: tuple[str, ...] = ()
    sign_2k: tuple[str, ...] = ()
    sign_jks: tuple[str, ...] = ()
    k_on_top: bool = False  # printed bracket layout puts K in the top row
    contractible: bool = True

    @property
    def changed_edges(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.chain)

    @property
    def spectators(self) -> tuple[str, ...]:
        return tuple(sp for _, sp in self.chain)

    @property
    def unchanged_edges(self) -> tuple[str, ...]:
        ch = set(self.changed_edges)
        return tuple(e for e in build_lattice(self.lattice).labels if e not in ch)


LOOPS: dict[str, LoopSpec] = {
    l.name: l
    for l in (
        LoopSpec("tetra_bcd", "tetrahedron",
                 (("j4", "j3"), ("j5", "j1"), ("j6", "j2")),
                 sign_j=("a", "d"), sign_k=("d",), sign_2j=("j1",), sign_jks=("j4",),
                 k_on_top=True),
        LoopSpec("tetra_bcda", "tetrahedron",
                 (("j1", "j2"), ("j3", "j5"), ("j4", "j2"), ("j6", "j5")),
                 sign_j=("a", "b", "c", "d"), sign_2j=("j1",), sign_2k=("j1",)),
        LoopSpec("cube_abcd", "cube",
                 (("j1", "j5"), ("j2", "j6"), ("j3", "j7"), ("j4", "j8")),
                 sign_j=("b", "d"), sign_k=("a", "c")),
        LoopSpec("cube_abfgcda", "cube",
                 (("j1", "j5"), ("j2", "j3"), ("j6", "j10"),
                  ("j11", "j12"), ("j7", "j3"), ("j4", "j8")),
                 sign_j=("a", "b", "g"), sign_k=("c", "d", "f")),
        LoopSpec("torus_abcd", "torus2",
                 (("j1a", "ja"), ("j2a", "j1c"), ("jd", "j2d"),
                  ("j1d", "jc"), ("j2b", "j1b"), ("jb", "j2c")),
                 sign_j=("a34", "b12", "c12", "c34", "d12"), sign_k=("b12", "c34", "d12")),
        LoopSpec("torus_line_ada", "torus2",
                 (("ja", "j1a"), ("j2a", "j1c"), ("jd", "j1d"), ("j2d", "j1b")),
                 sign_j=("a12", "a34", "b12", "b34", "c12", "c34"), sign_k=("a12", "a34"),
                 contractible=False),
        LoopSpec("torus_line_aba", "torus2",
                 (("j1a", "j2c"), ("jb", "j2b"), ("j1b", "j2d"), ("ja", "j2a")),
                 sign_j=("b12", "b34"), sign_k=("a12", "a34"),
                 contractible=False),
    )
}


def get_loop(loop) -> LoopSpec:
    if isinstance(loop, LoopSpec):
        return loop
    try:
        return LOOPS[loop]
    except KeyError:
        raise ValueError(f"unknown loop {loop!r}; choose from {', '.join(LOOPS)}") from None


@dataclass(frozen=True)
class MatrixElementResult:
    value: SurdSum
    deltas_satisfied: bool
    triads: tuple[tuple[str, HalfInt, HalfInt, HalfInt, bool], ...]

    @property
    def triads_satisfied(self) -> bool:
        return all(t[-1] for t in self.triads)


def _sigma_tw(loop: LoopSpec, lat: LatticeGraph, J, K, s: int) -> int:
    """Twice-exponent of the loop's sign rule."""
    t = 0
    for name in loop.sign_j:
        a, b, c = lat.triads[name]
        t += J[a] + J[b] + J[c]
    for name in loop.sign_k:
        a, b, c = lat.triads[name]
        t += K[a] + K[b] + K[c]
    for e in loop.sign_2j:
        t += 2 * J[e]
    for e in loop.sign_2k:
        t += 2 * K[e]
    for e in loop.sign_jks:
        t += J[e] + K[e] + s
    return t


def _check(loop: LoopSpec, lat: LatticeGraph, J, K) -> None:
    for d in (J, K):
        missing = [e for e in lat.labels if e not in d]
        if missing:
            raise ValueError(f"assignment is missing {', '.join(missing)}")


def _melem_tw(loop: LoopSpec, lat: LatticeGraph, J, K, s: int) -> SurdSum:
    """Fast path on twice-value dicts; J and K are assumed complete."""
    for e in loop.unchanged_edges:
        if J[e] != K[e]:
            return SurdSum()
    ch = loop.chain
    n = len(ch)
    for e, _ in ch:
        if not _tri(J[e], K[e], s):
            return SurdSum()
    if not (_admissible_tw(lat, J) and _admissible_tw(lat, K)):
        return SurdSum()
    prod = None
    for i in range(n):
        e, sp = ch[i]
        e2 = ch[(i + 1) % n][0]
        v = _sixj(J[e], K[e], s, K[e2], J[e2], J[sp])
        if not v:
            return v
        prod = v if prod is None else prod * v
    pi2 = 1
    for e, _ in ch:
        pi2 *= (J[e] + 1) * (K[e] + 1)
    val = prod * surd_from(Fraction(1, s + 1), pi2)
    return val * _sign(_sigma_tw(loop, lat, J, K, s))


def _tw_of(x) -> Mapping[str, int]:
    if isinstance(x, SpinAssignment):
        return x.tw
    return {k: half(v).twice for k, v in x.items()}


def matrix_element(loop, J, K, s) -> MatrixElementResult:
    """<J| W^(s)_C |K> with the trace normalized by 1/(2s+1)."""
    loop = get_loop(loop)
    lat = build_lattice(loop.lattice)
    Jt, Kt = _tw_of(J), _tw_of(K)
    _check(loop, lat, Jt, Kt)
    st = half(s).twice
    if st < 1:
        raise ValueError("the loop representation needs s >= 1/2")
    deltas = all(Jt[e] == Kt[e] for e in loop.unchanged_edges)
    triads = tuple(
        (e, HalfInt(Jt[e]), HalfInt(Kt[e]), HalfInt(st), _tri(Jt[e], Kt[e], st))
        for e in loop.changed_edges
    )
    return MatrixElementResult(_melem_tw(loop, lat, Jt, Kt, st), deltas, triads)


def _bracket_rows(loop: LoopSpec, J, K):
    top = tuple(J[e] for e in loop.changed_edges)
    mid = tuple(J[sp] for sp in loop.spectators)
    bot = tuple(K[e] for e in loop.changed_edges)
    return (bot, mid, top) if loop.k_on_top else (top, mid, bot)


def _bracket_sign_tw(loop: LoopSpec, lat: LatticeGraph, J, K, s: int) -> int:
    """Sign relating the x = s bracket term to the 6j chain of the matrix element."""
    top, mid, bot = _bracket_rows(loop, J, K)
    t = _sigma_tw(loop, lat, J, K, s)
    # undo the (-1)^(R + n s) carried by the x = s term of the bracket
    t += sum(top) + sum(mid) + sum(bot) + len(top) * s
    return _sign(t) if t % 2 == 0 else 1


def _prefactor_tw(loop: LoopSpec, lat: LatticeGraph, J, K, s: int) -> SurdSum:
    if any(J[e] != K[e] for e in loop.unchanged_edges):
        return SurdSum()
    pi2 = 1
    for e in loop.changed_edges:
        pi2 *= (J[e] + 1) * (K[e] + 1)
    sign = _bracket_sign_tw(loop, lat, J, K, s)
    return surd_from(Fraction(sign, (s + 1) ** 2), pi2)


def bracket_form(loop, J, K, s) -> tuple[SecondKindBracket, SurdSum]:
    """Bracket in the printed row layout and the prefactor that goes with it.

    ``matrix_element == prefactor * single_x_reduction(bracket, s)`` whenever all
    ladder triads hold.  The prefactor is +-Pi(j_l, k_l)/Pi^4(s) times the deltas on
    untouched spins.
    """
    loop = get_loop(loop)
    lat = build_lattice(loop.lattice)
    Jt, Kt = _tw_of(J), _tw_of(K)
    _check(loop, lat, Jt, Kt)
    st = half(s).twice
    top, mid, bot = _bracket_rows(loop, Jt, Kt)
    br = SecondKindBracket([HalfInt(x) for x in top], [HalfInt(x) for x in mid],
                           [HalfInt(x) for x in bot])
    return br, _prefactor_tw(loop, lat, Jt, Kt, st)


def overlap(lattice, J, K) -> SurdSum:
    """<J|K> for normalized spin-network states: a Kronecker delta."""
    lat = lattice if isinstance(lattice, LatticeGraph) else build_lattice(lattice)
    Jt, Kt = _tw_of(J), _tw_of(K)
    if not (_admissible_tw(lat, Jt) and _admissible_tw(lat, Kt)):
        return SurdSum()
    same = all(Jt[e] == Kt[e] for e in lat.labels)
    return SurdSum.rational(1 if same else 0)


def loop_window(loop: LoopSpec, J: Mapping[str, int], s: int, pad: int = 0):
    """Every K reachable from J: changed links move by -s..s (widened by ``pad`` steps)."""
    from itertools import product

    ch = loop.changed_edges
    steps = range(-s - 2 * pad, s + 2 * pad + 1, 2)
    for d in product(steps, repeat=len(ch)):
        K = dict(J)
        ok = True
        for e, x in zip(ch, d):
            v = J[e] + x
            if v < 0:
                ok = False
                break
            K[e] = v
        if ok:
            yield K


def sector_eigenvalue(loop, s, sector: TopologicalSector) -> int:
    """Eigenvalue of the loop on the sector-(p, q) ground state.

    The Z2 factors sit on one link per non-contractible cycle, so a loop picks up
    (-1)^(2s) for each such link it moves.
    """
    loop = get_loop(loop)
    if lattice_kind(loop.lattice) != "torus2":
        return 1
    lat = build_lattice("torus2")
    st = half(s).twice
    ch = set(loop.changed_edges)
    n = sector.p * len(ch & set(lat.edge_classes["p_phase"]))
    n += sector.q * len(ch & set(lat.edge_classes["q_phase"]))
    return -1 if (n * st) % 2 else 1
