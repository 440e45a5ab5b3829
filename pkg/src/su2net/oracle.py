"""Brute-force reference evaluators that share no code with the production symbols.

* Clebsch-Gordan coefficients come from the highest-weight state and repeated
  lowering, never from a closed formula.
* 6j symbols are the quadruple-3j sum over all six projections.
* Spin-network amplitudes, overlaps and Wilson-loop matrix elements are full
  magnetic-index contractions of explicit vertex tensors and link-operator blocks.

The contractions run in exact integer arithmetic.  Every tensor entry is split as
rational * sqrt(kernel) * prod_axes sqrt((j+m)!(j-m)!), with one kernel per tensor;
summing an index shared by two tensors then only ever multiplies by the integer
(j+m)!(j-m)!, so the network contracts as object arrays of Python ints.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Mapping

import numpy as np

from .exact import SurdSum, half, squarefree_split, surd_from

__all__ = [
    "oracle_cg",
    "oracle_3j",
    "oracle_6j",
    "oracle_amplitude",
    "oracle_overlap",
    "oracle_loop_matrix_element",
    "OracleBoundError",
    "ORACLE_MAX_TWICE",
]

ORACLE_MAX_TWICE = 4  # spins up to 2 in the contractions


class OracleBoundError(RuntimeError):
    """The requested contraction is beyond the oracle's size bound."""


def _phase(tw: int) -> int:
    assert tw % 2 == 0, tw
    return -1 if (tw // 2) % 2 else 1


# ------------------------------------------------------------ CG by recursion

def _raise_sq(j: int, m: int) -> Fraction:
    """|<j m+1| J+ |j m>|^2 for twice-values."""
    return Fraction((j - m) * (j + m + 2), 4)


def _lower_sq(j: int, m: int) -> Fraction:
    """|<j m-1| J- |j m>|^2 for twice-values."""
    return Fraction((j + m) * (j - m + 2), 4)


@lru_cache(maxsize=None)
def _cg_table(j1: int, j2: int, J: int) -> dict:
    """All <j1 m1; j2 M-m1 | J M> keyed by (m1, M), twice-values."""
    if not (abs(j1 - j2) <= J <= j1 + j2 and (j1 + j2 + J) % 2 == 0):
        return {}
    # highest weight: J+ |J J> = 0 fixes the ratios, m1 = j1 gets the positive sign
    sq = {}
    sg = {}
    m1 = j1
    sq[m1], sg[m1] = Fraction(1), 1
    while True:
        m2 = J - m1
        nm1 = m1 - 2
        if nm1 < -j1 or J - nm1 > j2:
            break
        # c(nm1) * raise(j1, nm1) + c(m1) * raise(j2, m2) = 0
        sq[nm1] = sq[m1] * _raise_sq(j2, m2) / _raise_sq(j1, nm1)
        sg[nm1] = -sg[m1]
        m1 = nm1
    norm = sum(sq.values())
    table = {(m, J): surd_from(sg[m], sq[m] / norm) for m in sq}
    M = J
    while M > -J:
        bJ = surd_from(1, _lower_sq(J, M))
        for m1 in range(-j1, j1 + 1, 2):
            m2 = M - 2 - m1
            if abs(m2) > j2:
                continue
            v = SurdSum()
            up = table.get((m1 + 2, M))
            if up:
                v = v + up * surd_from(1, _lower_sq(j1, m1 + 2))
            same = table.get((m1, M))
            if same:
                v = v + same * surd_from(1, _lower_sq(j2, M - m1))
            if v:
                table[(m1, M - 2)] = v / bJ
        M -= 2
    return table


def _ocg(j1, m1, j2, m2, J, M) -> SurdSum:
    if m1 + m2 != M or abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return SurdSum()
    return _cg_table(j1, j2, J).get((m1, M), SurdSum())


def oracle_cg(j1, m1, j2, m2, J, M) -> SurdSum:
    """<j1 m1; j2 m2 | J M> by lowering from the highest-weight state."""
    args = [half(x).twice for x in (j1, m1, j2, m2, J, M)]
    for j, m in zip(args[::2], args[1::2]):
        if (j - m) % 2:
            raise ValueError("projection and spin differ in parity")
    return _ocg(*args)


def _o3j(j1, j2, j3, m1, m2, m3) -> SurdSum:
    v = _ocg(j1, m1, j2, m2, j3, -m3)
    if not v:
        return v
    return v * surd_from(_phase(j1 - j2 - m3), Fraction(1, j3 + 1))


def oracle_3j(j1, j2, j3, m1, m2, m3) -> SurdSum:
    args = [half(x).twice for x in (j1, j2, j3, m1, m2, m3)]
    return _o3j(*args)


def _ms(j: int) -> range:
    return range(-j, j + 1, 2)


def oracle_6j(j1, j2, j3, j4, j5, j6) -> SurdSum:
    """Quadruple-3j sum over all projections, no shortcuts."""
    a, b, c, d, e, f = (half(x).twice for x in (j1, j2, j3, j4, j5, j6))
    total = SurdSum()
    for m1, m2, m3, m4, m5, m6 in product(_ms(a), _ms(b), _ms(c), _ms(d), _ms(e), _ms(f)):
        t1 = _o3j(a, b, c, -m1, -m2, -m3)
        if not t1:
            continue
        t2 = _o3j(a, e, f, m1, -m5, m6)
        if not t2:
            continue
        t3 = _o3j(d, b, f, m4, m2, -m6)
        if not t3:
            continue
        t4 = _o3j(d, e, c, -m4, m5, m3)
        if not t4:
            continue
        S = (a - m1) + (b - m2) + (c - m3) + (d - m4) + (e - m5) + (f - m6)
        total = total + t1 * t2 * t3 * t4 * _phase(S)
    return total


# ---------------------------------------------------------- exact tensor nets

def _d2(j: int, m: int) -> int:
    return math.factorial((j + m) // 2) * math.factorial((j - m) // 2)


class _Tensor:
    """value[idx] = scale * sqrt(kernel) * data[idx] * prod_axes sqrt(d2(j, m))."""

    __slots__ = ("ids", "js", "data", "scale", "kernel")

    def __init__(self, ids, js, entry: Callable[[tuple], SurdSum]):
        self.ids = list(ids)
        self.js = list(js)
        shape = [j + 1 for j in js]
        rat = {}
        kernel = None
        for idx in product(*[range(n) for n in shape]):
            ms = tuple(2 * i - j for i, j in zip(idx, js))
            v = entry(ms)
            if not v:
                continue
            c, q = v.single()
            P = 1
            for j, m in zip(js, ms):
                P *= _d2(j, m)
            s, k = squarefree_split(q * P)
            if kernel is None:
                kernel = k
            elif k != kernel:
                raise AssertionError("tensor entries do not share one surd kernel")
            rat[idx] = c * s / P
        L = 1
        for r in rat.values():
            L = L * r.denominator // math.gcd(L, r.denominator)
        data = np.zeros(shape, dtype=object)
        data[...] = 0
        for idx, r in rat.items():
            data[idx] = int(r * L)
        self.data = data
        self.scale = Fraction(1, L)
        self.kernel = kernel or 1
        if not rat:
            self.scale = Fraction(0)

    def weight(self, axis: int) -> None:
        j = self.js[axis]
        w = np.array([_d2(j, m) for m in _ms(j)], dtype=object)
        shape = [1] * self.data.ndim
        shape[axis] = j + 1
        self.data = self.data * w.reshape(shape)


def _pairwise(ops):
    """Contract a closed network, always merging the pair with the smallest result.

    np.einsum's optimized path returns wrong sums on some object-dtype networks, so
    the pairwise merges go through tensordot, which stays in Python ints.
    """
    ops = list(ops)
    while len(ops) > 1:
        best = None
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                (A, ia), (B, ib) = ops[i], ops[j]
                shared = set(ia) & set(ib)
                size = 1
                for ax, x in enumerate(ia):
                    if x not in shared:
                        size *= A.shape[ax]
                for ax, x in enumerate(ib):
                    if x not in shared:
                        size *= B.shape[ax]
                key = (size, -len(shared))
                if best is None or key < best[0]:
                    best = (key, i, j, sorted(shared))
        _, i, j, shared = best
        (A, ia), (B, ib) = ops[i], ops[j]
        C = np.tensordot(A, B, axes=([ia.index(x) for x in shared], [ib.index(x) for x in shared]))
        out = [x for x in ia if x not in shared] + [x for x in ib if x not in shared]
        ops = [o for k, o in enumerate(ops) if k not in (i, j)] + [(C, out)]
    return ops[0][0]


def _contract(tensors: list[_Tensor]) -> SurdSum:
    seen = set()
    for t in tensors:
        if t.scale == 0:
            return SurdSum()
    for t in tensors:
        for ax, i in enumerate(t.ids):
            if i not in seen:
                seen.add(i)
                t.weight(ax)
    total = _pairwise([(t.data, list(t.ids)) for t in tensors])
    coeff = Fraction(int(total))
    kernel = 1
    for t in tensors:
        coeff *= t.scale
        g = math.gcd(kernel, t.kernel)
        kernel = (kernel // g) * (t.kernel // g)
        coeff *= g
    return SurdSum.term(coeff, kernel) if coeff else SurdSum()


# ----------------------------------------------------------------- the graphs
#
# Each graph lists, per vertex, its link ends in coupling order; '+' marks the end
# a link leaves from.  A '-' end with projection m enters the coupling as -m with
# the factor (-1)^(j-m).  Four-valent torus vertices couple ends 1,2 and ends 3,4
# to the vertex spin jv with the singlet weight (-1)^(jv-M)/sqrt(2jv+1).  The
# vertex phases fix the basis to the one used by the closed-form amplitudes.

def _triad_sum(*labels):
    return lambda J: sum(J[e] for e in labels)


def _graph(orient, order, phases=None, four=None):
    nodes = {}
    if four is None:
        for v, labels in order.items():
            nodes[v] = {"ends": [(e, "+" if orient[e][0] == v else "-") for e in labels]}
    else:
        for v, (labels, jv) in four.items():
            nodes[v] = {"ends": [(labels[0], "+"), (labels[1], "+"),
                                 (labels[2], "-"), (labels[3], "-")], "v": jv}
    for v, f in (phases or {}).items():
        nodes[v]["phase"] = f
    links = sorted({e for n in nodes.values() for e, _ in n["ends"]})
    virt = sorted({n["v"] for n in nodes.values() if "v" in n})
    return {"nodes": nodes, "links": links, "virt": virt}


_TETRA_G = _graph(
    {"j1": "ad", "j2": "ca", "j3": "ab", "j4": "bc", "j5": "bd", "j6": "cd"},
    {"a": ("j1", "j2", "j3"), "b": ("j3", "j4", "j5"),
     "c": ("j4", "j2", "j6"), "d": ("j1", "j5", "j6")},
)

_CUBE_ORDER = {"a": ("j1", "j2", "j5"), "b": ("j2", "j3", "j6"), "c": ("j3", "j4", "j7"),
               "d": ("j4", "j1", "j8"), "e": ("j5", "j9", "j10"), "f": ("j6", "j10", "j11"),
               "g": ("j7", "j11", "j12"), "h": ("j8", "j9", "j12")}
_cube_phases = {v: _triad_sum(*_CUBE_ORDER[v]) for v in "bcdefg"}
_cube_phases["a"] = lambda J: J["j1"] + J["j2"] + J["j5"] + 2 * J["j1"]
_cube_phases["h"] = lambda J: 2 * J["j9"]
_CUBE_G = _graph(
    {"j1": "ad", "j2": "ab", "j3": "bc", "j4": "cd", "j5": "ae", "j6": "bf",
     "j7": "cg", "j8": "dh", "j9": "eh", "j10": "ef", "j11": "fg", "j12": "gh"},
    _CUBE_ORDER,
    phases=_cube_phases,
)

_TORUS_G = _graph(
    None,
    None,
    phases={"a": _triad_sum("j1a", "j2a", "ja", "j1b", "j2d", "ja"),
            "c": _triad_sum("j1c", "j2c", "jc", "j1d", "j2b", "jc")},
    four={"a": (("j1a", "j2a", "j1b", "j2d"), "ja"),
          "b": (("j1b", "j2b", "j1a", "j2c"), "jb"),
          "c": (("j1c", "j2c", "j1d", "j2b"), "jc"),
          "d": (("j1d", "j2d", "j1c", "j2a"), "jd")},
)

_GRAPHS = {"tetrahedron": _TETRA_G, "cube": _CUBE_G, "torus2": _TORUS_G}

# loop as the sequence of (vertex, link leaving it towards the next vertex)
_WALKS = {
    "tetra_bcd": ("tetrahedron", [("b", "j4"), ("c", "j6"), ("d", "j5")]),
    "tetra_bcda": ("tetrahedron", [("b", "j4"), ("c", "j6"), ("d", "j1"), ("a", "j3")]),
    "cube_abcd": ("cube", [("d", "j1"), ("a", "j2"), ("b", "j3"), ("c", "j4")]),
    "cube_abfgcda": ("cube", [("d", "j1"), ("a", "j2"), ("b", "j6"),
                              ("f", "j11"), ("g", "j7"), ("c", "j4")]),
    "torus_abcd": ("torus2", [("b", "j1a"), ("a", "j2a"), ("d", "j1d"), ("c", "j2b")]),
    "torus_line_ada": ("torus2", [("a", "j2a"), ("d", "j2d")]),
    "torus_line_aba": ("torus2", [("a", "j1a"), ("b", "j1b")]),
}

_KIND = {"tetra": "tetrahedron", "tetrahedron": "tetrahedron", "cube": "cube",
         "torus": "torus2", "torus2": "torus2"}


def _graph_for(kind) -> dict:
    k = getattr(kind, "kind", kind)
    try:
        return _GRAPHS[_KIND[k]]
    except KeyError:
        raise ValueError(f"unknown lattice {k!r}") from None


def _vertex_tensor(node, J, ids) -> _Tensor:
    ends = node["ends"]
    js = [J[e] for e, _ in ends]
    ph = node.get("phase")
    sign0 = _phase(ph(J)) if ph is not None else 1

    def flip(ms):
        out = []
        sign = sign0
        for m, (e, end), j in zip(ms, ends, js):
            if end == "-":
                sign *= _phase(j - m)
                out.append(-m)
            else:
                out.append(m)
        return out, sign

    if len(ends) == 3:
        def entry(ms):
            mm, sign = flip(ms)
            v = _o3j(js[0], js[1], js[2], *mm)
            return v * sign if v else v
    else:
        jv = J[node["v"]]

        def entry(ms):
            mm, sign = flip(ms)
            M = mm[0] + mm[1]
            if abs(M) > jv:
                return SurdSum()
            c1 = _ocg(js[0], mm[0], js[1], mm[1], jv, M)
            if not c1:
                return c1
            c2 = _ocg(js[2], mm[2], js[3], mm[3], jv, -M)
            if not c2:
                return c2
            return c1 * c2 * surd_from(sign * _phase(jv - M), Fraction(1, jv + 1))

    return _Tensor(ids, js, entry)


def _check_bound(J: Mapping[str, int], graph, s: int = 0) -> None:
    big = [e for e in graph["links"] + graph["virt"] if J[e] > ORACLE_MAX_TWICE]
    if big or s > ORACLE_MAX_TWICE:
        raise OracleBoundError(
            f"oracle contraction limited to spins <= {ORACLE_MAX_TWICE}/2"
        )


def _tw(J) -> dict[str, int]:
    if hasattr(J, "tw"):
        return dict(J.tw)
    return {k: half(v).twice for k, v in J.items()}


def _admissible(graph, J) -> bool:
    for node in graph["nodes"].values():
        js = [J[e] for e, _ in node["ends"]]
        if len(js) == 3:
            a, b, c = js
            if not (abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0):
                return False
        else:
            jv = J[node["v"]]
            for a, b in ((js[0], js[1]), (js[2], js[3])):
                if not (abs(a - b) <= jv <= a + b and (a + b + jv) % 2 == 0):
                    return False
    return True


def oracle_amplitude(lattice, J) -> SurdSum:
    """Phi from the state at identity holonomies: contract vertex tensors along the links."""
    g = _graph_for(lattice)
    J = _tw(J)
    _check_bound(J, g)
    if not _admissible(g, J):
        return SurdSum()
    idx = {e: i for i, e in enumerate(g["links"])}
    ts = [_vertex_tensor(n, J, [idx[e] for e, _ in n["ends"]]) for n in g["nodes"].values()]
    v = _contract(ts)
    dim = 1
    for e in g["links"]:
        dim *= J[e] + 1
    return v * surd_from(1, dim)


def _side_ids(g, changed):
    """Index ids for the two link ends, J side and K side (shared when unchanged)."""
    nxt = iter(range(10 ** 6))
    Lj, Lk = {}, {}
    for e in g["links"]:
        for end in "+-":
            Lj[e, end] = next(nxt)
            Lk[e, end] = next(nxt) if e in changed else Lj[e, end]
    return Lj, Lk, nxt


def oracle_overlap(lattice, J, K) -> SurdSum:
    """<J|K> by contracting the two states link by link."""
    g = _graph_for(lattice)
    J, K = _tw(J), _tw(K)
    _check_bound(J, g)
    _check_bound(K, g)
    if not (_admissible(g, J) and _admissible(g, K)):
        return SurdSum()
    # link states |j m+ m-> with different j are orthogonal
    if any(J[e] != K[e] for e in g["links"]):
        return SurdSum()
    Lj, Lk, _ = _side_ids(g, set())
    ts = []
    for n in g["nodes"].values():
        ts.append(_vertex_tensor(n, J, [Lj[e, end] for e, end in n["ends"]]))
        ts.append(_vertex_tensor(n, K, [Lk[e, end] for e, end in n["ends"]]))
    return _contract(ts)


def _block(j: int, k: int, s: int, forward: bool, ids) -> _Tensor:
    """<j a b| U^(s)_{alpha beta} |k c d> on one link, indices (a, b, c, d, alpha, beta)."""
    ratio = Fraction(k + 1, j + 1)

    def entry(ms):
        a, b, c, d, al, be = ms
        if forward:
            v = _ocg(s, al, k, c, j, a)
            if not v:
                return v
            w = _ocg(s, be, k, d, j, b)
            sign = 1
        else:
            # U^-1 on a reversed link: D(U^-1)_{al be} = (-1)^(be-al) D(U)_{-be,-al}
            v = _ocg(s, -be, k, c, j, a)
            if not v:
                return v
            w = _ocg(s, -al, k, d, j, b)
            sign = _phase(be - al)
        if not w:
            return w
        return v * w * surd_from(sign, ratio)

    return _Tensor(ids, [j, j, k, k, s, s], entry)


def oracle_loop_matrix_element(loop, J, K, s) -> SurdSum:
    """<J| Tr W^(s) |K> / (2s+1) by full magnetic-index contraction."""
    name = getattr(loop, "name", loop)
    try:
        kind, walk = _WALKS[name]
    except KeyError:
        raise ValueError(f"no oracle walk for loop {name!r}") from None
    g = _GRAPHS[kind]
    J, K = _tw(J), _tw(K)
    st = half(s).twice
    _check_bound(J, g, st)
    _check_bound(K, g, st)
    if not (_admissible(g, J) and _admissible(g, K)):
        return SurdSum()
    changed = {e for _, e in walk}
    for e in g["links"]:
        if e not in changed and J[e] != K[e]:
            return SurdSum()
    Lj, Lk, nxt = _side_ids(g, changed)
    ts = []
    for n in g["nodes"].values():
        ts.append(_vertex_tensor(n, J, [Lj[e, end] for e, end in n["ends"]]))
        ts.append(_vertex_tensor(n, K, [Lk[e, end] for e, end in n["ends"]]))
    n = len(walk)
    al = [next(nxt) for _ in range(n)]
    for i, (v, e) in enumerate(walk):
        forward = (e, "+") in g["nodes"][v]["ends"]
        ids = [Lj[e, "+"], Lj[e, "-"], Lk[e, "+"], Lk[e, "-"], al[i], al[(i + 1) % n]]
        ts.append(_block(J[e], K[e], st, forward, ids))
    return _contract(ts) * Fraction(1, st + 1)
