"""The three small lattices, spin assignments on them and their ground-state amplitudes.

Edge labels follow the usual figures: j1..j6 on the tetrahedron, j1..j12 on the
cube, and on the 2x2 torus the eight links j1a, j2a, j1b, ... plus one intermediate
coupling spin ja, jb, jc, jd per four-valent vertex.

The torus is stored after the link identifications, so every link carries exactly
one label and each four-valent vertex v is split into two coupling triads:
v12 = (j1v, j2v, jv) and v34 = (j3v, j4v, jv), where j3v and j4v are the labels of
the incoming horizontal and vertical links.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Iterator, Mapping

from .exact import HalfInt, SurdSum, half, surd_from
from .second_kind import _second_kind_tw
from .wigner import _sixj, _tri

__all__ = [
    "LatticeGraph",
    "SpinAssignment",
    "TopologicalSector",
    "build_lattice",
    "admissible",
    "amplitude",
    "enumerate_assignments",
    "count_assignments",
    "LATTICE_KINDS",
]

LATTICE_KINDS = ("tetrahedron", "cube", "torus2")
_ALIASES = {"tetra": "tetrahedron", "tetrahedron": "tetrahedron", "cube": "cube",
            "torus": "torus2", "torus2": "torus2"}


@dataclass(frozen=True)
class TopologicalSector:
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.p not in (0, 1) or self.q not in (0, 1):
            raise ValueError("sector labels p, q must be 0 or 1")

    @property
    def trivial(self) -> bool:
        return self.p == 0 and self.q == 0

    @classmethod
    def parse(cls, text: str) -> "TopologicalSector":
        try:
            p, q = (int(x) for x in text.split(","))
        except ValueError:
            raise ValueError(f"sector must look like 'p,q', got {text!r}") from None
        return cls(p, q)

    def __str__(self):
        return f"{self.p},{self.q}"


TRIVIAL = TopologicalSector(0, 0)


@dataclass(frozen=True)
class LatticeGraph:
    kind: str
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (from, to, label)
    triads: Mapping[str, tuple[str, str, str]]  # coupling name -> labels
    vertex_spins: tuple[str, ...] = ()
    edge_classes: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, ...]:
        """All spin labels in enumeration order: links first, then vertex spins."""
        return tuple(e for _, _, e in self.edges) + self.vertex_spins

    def endpoints(self, label: str) -> tuple[str, str]:
        for u, v, e in self.edges:
            if e == label:
                return u, v
        raise KeyError(label)


def _mk(kind, vertices, edges, triads, vspins=(), classes=None):
    return LatticeGraph(
        kind=kind,
        vertices=tuple(vertices),
        edges=tuple(edges),
        triads=MappingProxyType(dict(triads)),
        vertex_spins=tuple(vspins),
        edge_classes=MappingProxyType(dict(classes or {})),
    )


_TETRA = _mk(
    "tetrahedron",
    "abcd",
    [("a", "d", "j1"), ("a", "c", "j2"), ("a", "b", "j3"),
     ("b", "c", "j4"), ("b", "d", "j5"), ("c", "d", "j6")],
    {"a": ("j1", "j2", "j3"), "b": ("j3", "j4", "j5"),
     "c": ("j2", "j4", "j6"), "d": ("j1", "j5", "j6")},
)

_CUBE = _mk(
    "cube",
    "abcdefgh",
    [("a", "d", "j1"), ("a", "b", "j2"), ("b", "c", "j3"), ("c", "d", "j4"),
     ("a", "e", "j5"), ("b", "f", "j6"), ("c", "g", "j7"), ("d", "h", "j8"),
     ("e", "h", "j9"), ("e", "f", "j10"), ("f", "g", "j11"), ("g", "h", "j12")],
    {"a": ("j1", "j2", "j5"), "b": ("j2", "j3", "j6"), "c": ("j3", "j4", "j7"),
     "d": ("j4", "j1", "j8"), "e": ("j5", "j9", "j10"), "f": ("j6", "j10", "j11"),
     "g": ("j7", "j11", "j12"), "h": ("j8", "j9", "j12")},
)

# rows of the torus: a b on top, d c below; j1v leaves v horizontally, j2v vertically
_TORUS = _mk(
    "torus2",
    "abcd",
    [("a", "b", "j1a"), ("a", "d", "j2a"), ("b", "a", "j1b"), ("b", "c", "j2b"),
     ("c", "d", "j1c"), ("c", "b", "j2c"), ("d", "c", "j1d"), ("d", "a", "j2d")],
    {"a12": ("j1a", "j2a", "ja"), "a34": ("j1b", "j2d", "ja"),
     "b12": ("j1b", "j2b", "jb"), "b34": ("j1a", "j2c", "jb"),
     "c12": ("j1c", "j2c", "jc"), "c34": ("j1d", "j2b", "jc"),
     "d12": ("j1d", "j2d", "jd"), "d34": ("j1c", "j2a", "jd")},
    vspins=("ja", "jb", "jc", "jd"),
    classes={"vertical": ("j2a", "j2d", "j2b", "j2c"),
             "horizontal": ("j1a", "j1b", "j1c", "j1d"),
             # one link per non-contractible cycle carries each Z2 factor
             "p_phase": ("j2a", "j2b"),
             "q_phase": ("j1a", "j1d")},
)

_LATTICES = {"tetrahedron": _TETRA, "cube": _CUBE, "torus2": _TORUS}


def lattice_kind(kind: str) -> str:
    try:
        return _ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown lattice {kind!r}; choose from tetra, cube, torus2") from None


def build_lattice(kind: str) -> LatticeGraph:
    return _LATTICES[lattice_kind(kind)]


class SpinAssignment(Mapping[str, HalfInt]):
    """Immutable map from spin label to HalfInt; ``.tw`` holds the twice-values."""

    __slots__ = ("tw", "_key")

    def __init__(self, spins: Mapping[str, object] | None = None, **kw):
        d = dict(spins or {})
        d.update(kw)
        self.tw = {k: half(v).twice for k, v in d.items()}
        if any(v < 0 for v in self.tw.values()):
            raise ValueError("spins must be non-negative")
        self._key = None

    @classmethod
    def from_twice(cls, tw: Mapping[str, int]) -> "SpinAssignment":
        obj = cls.__new__(cls)
        obj.tw = dict(tw)
        obj._key = None
        return obj

    @classmethod
    def parse(cls, text: str) -> "SpinAssignment":
        """``j1=1,j2=1,j3=2`` with twice-j integers."""
        tw = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"expected label=twice_j, got {part!r}")
            k, v = part.split("=", 1)
            try:
                t = int(v)
            except ValueError:
                raise ValueError(f"twice-j must be an integer, got {v!r} for {k}") from None
            if t < 0:
                raise ValueError(f"negative spin for {k}")
            tw[k] = t
        return cls.from_twice(tw)

    def to_text(self, order=None) -> str:
        keys = order or sorted(self.tw)
        return ",".join(f"{k}={self.tw[k]}" for k in keys if k in self.tw)

    def replace(self, **tw: int) -> "SpinAssignment":
        d = dict(self.tw)
        d.update(tw)
        return SpinAssignment.from_twice(d)

    def __getitem__(self, k):
        return HalfInt(self.tw[k])

    def __iter__(self):
        return iter(self.tw)

    def __len__(self):
        return len(self.tw)

    def _k(self):
        if self._key is None:
            self._key = tuple(sorted(self.tw.items()))
        return self._key

    def __eq__(self, other):
        if isinstance(other, SpinAssignment):
            return self.tw == other.tw
        return NotImplemented

    def __hash__(self):
        return hash(self._k())

    def __repr__(self):
        return f"SpinAssignment({self.to_text()})"


def _as_tw(lat: LatticeGraph, J) -> dict[str, int]:
    tw = J.tw if isinstance(J, SpinAssignment) else {k: half(v).twice for k, v in J.items()}
    missing = [e for e in lat.labels if e not in tw]
    if missing:
        raise ValueError(f"assignment is missing {', '.join(missing)}")
    return tw


def _admissible_tw(lat: LatticeGraph, tw: Mapping[str, int]) -> bool:
    for a, b, c in lat.triads.values():
        if not _tri(tw[a], tw[b], tw[c]):
            return False
    return True


def admissible(lattice: LatticeGraph, assignment) -> bool:
    return _admissible_tw(lattice, _as_tw(lattice, assignment))


def _pi2_labels(tw, labels) -> int:
    r = 1
    for e in labels:
        r *= tw[e] + 1
    return r


def _sector_sign(tw: Mapping[str, int], sector: TopologicalSector) -> int:
    # (-1)^(2p(j2a+j2b)) (-1)^(2q(j1a+j1d)) with twice-values
    t = sector.p * (tw["j2a"] + tw["j2b"]) + sector.q * (tw["j1a"] + tw["j1d"])
    return -1 if t % 2 else 1


def _bare_tw(kind: str, tw: Mapping[str, int]) -> SurdSum:
    """The 3nj part of the amplitude, without Pi factor or sector phase."""
    if kind == "tetrahedron":
        return _sixj(tw["j1"], tw["j2"], tw["j3"], tw["j4"], tw["j5"], tw["j6"])
    if kind == "cube":
        g = lambda *n: tuple(tw[f"j{i}"] for i in n)
        return _second_kind_tw(g(1, 2, 3, 4), g(5, 6, 7, 8), g(9, 10, 11, 12))
    g = lambda *n: tuple(tw[e] for e in n)
    return _second_kind_tw(
        g("j2a", "j1a", "j2c", "j1c"), g("ja", "jb", "jc", "jd"), g("j2d", "j1b", "j2b", "j1d")
    )


def _amplitude_tw(lat: LatticeGraph, tw: Mapping[str, int], sector=TRIVIAL) -> SurdSum:
    if not _admissible_tw(lat, tw):
        return SurdSum()
    v = _bare_tw(lat.kind, tw)
    if not v:
        return v
    v = v * surd_from(1, _pi2_labels(tw, lat.labels))
    if lat.kind == "torus2" and _sector_sign(tw, sector) < 0:
        v = -v
    return v


def amplitude(lattice: LatticeGraph, assignment, sector: TopologicalSector = TRIVIAL) -> SurdSum:
    """Ground-state amplitude Phi of a spin-network basis state (exact 0 if inadmissible)."""
    if not sector.trivial and lattice.kind != "torus2":
        raise ValueError("topological sectors exist only on the torus")
    return _amplitude_tw(lattice, _as_tw(lattice, assignment), sector)


def _exhaustive(lat: LatticeGraph, jmax2: int) -> Iterator[dict[str, int]]:
    labels = lat.labels
    pos = {e: i for i, e in enumerate(labels)}
    # triads become checkable once their last label has been assigned
    ready: list[list[tuple[str, str, str]]] = [[] for _ in labels]
    for t in lat.triads.values():
        ready[max(pos[e] for e in t)].append(t)
    cur: dict[str, int] = {}

    def rec(i):
        if i == len(labels):
            yield dict(cur)
            return
        e = labels[i]
        for v in range(jmax2 + 1):
            cur[e] = v
            if all(_tri(cur[a], cur[b], cur[c]) for a, b, c in ready[i]):
                yield from rec(i + 1)
        del cur[e]

    yield from rec(0)


def enumerate_assignments(
    lattice: LatticeGraph,
    jmax,
    sample: int | None = None,
    seed: int = 0,
) -> Iterator[SpinAssignment]:
    """Admissible assignments with every spin <= jmax.

    Exhaustive mode walks the labels in ``lattice.labels`` order, lexicographically in
    the twice-values (first label slowest).  With ``sample=n`` it draws n distinct
    assignments uniformly at random from the admissible set, seeded by ``seed``.
    """
    jmax2 = half(jmax).twice
    if jmax2 < 0:
        raise ValueError("jmax must be non-negative")
    if sample is None:
        for tw in _exhaustive(lattice, jmax2):
            yield SpinAssignment.from_twice(tw)
        return
    rng = random.Random(seed)
    labels = lattice.labels
    seen = set()
    tries = 0
    budget = 2000 * sample + 10 ** 6
    while len(seen) < sample and tries < budget:
        tries += 1
        tw = {e: rng.randint(0, jmax2) for e in labels}
        if not _admissible_tw(lattice, tw):
            continue
        key = tuple(tw[e] for e in labels)
        if key in seen:
            continue
        seen.add(key)
        yield SpinAssignment.from_twice(tw)


def count_assignments(lattice: LatticeGraph, jmax) -> int:
    return sum(1 for _ in _exhaustive(lattice, half(jmax).twice))
