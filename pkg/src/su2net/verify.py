"""Exact sweeps of the Wigner-coefficient identities that follow from Wilson-loop eigen-equations.

Every identity here has the shape

    sum_K  w(K) * B(J, K) * A(K) * phase(K)  =  Pi^4(s) * A(J) * phase(J) * lambda

with A the bare 3nj part of the amplitude, B the second-kind bracket of the matrix
element and w a Pi weight on the changed spins of K.  Two evaluations of B are
available:

``form="chain"``
    B is the x = s term of the bracket with the sign that makes w * B equal the
    chain-of-6j matrix element, i.e. the identity is exactly sum_K M Phi(K) = Phi(J)
    written in bracket layout.  This is the default.
``form="printed"``
    B is the full x-sum of the bracket and w is the weight exactly as printed.

The sweep never stops at a failure; all of them are collected in the report.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Iterable, Sequence

from .exact import HalfInt, SurdSum, format_surd, half, parse_surd, surd_from
from .lattices import (
    TRIVIAL,
    SpinAssignment,
    TopologicalSector,
    _admissible_tw,
    _amplitude_tw,
    _bare_tw,
    _sector_sign,
    build_lattice,
    enumerate_assignments,
)
from .second_kind import _chain_term, _second_kind_tw
from .wigner import _sign, _sixj, _tri
from .wilson import (
    LOOPS,
    _bracket_rows,
    _bracket_sign_tw,
    _melem_tw,
    get_loop,
    loop_window,
    sector_eigenvalue,
)

__all__ = [
    "IdentityId",
    "Failure",
    "IdentityReport",
    "verify",
    "residual",
    "phase_cancellation_check",
    "relabel_check",
    "TORUS_TO_CUBE",
    "DEFAULT_SAMPLE",
]

DEFAULT_SAMPLE = 500
AUTO = "auto"


class IdentityId(str, Enum):
    FI6J = "FI6J"
    FI6J_S = "FI6J_S"
    I6J12J = "I6J12J"
    CUBE_12_12 = "CUBE_12_12"
    CUBE_12_18 = "CUBE_12_18"
    TORUS_18_18 = "TORUS_18_18"
    TORUS_LINE_12_12 = "TORUS_LINE_12_12"
    ITERATED = "ITERATED"
    V2 = "V2"
    MEVE_GENERIC = "MEVE_GENERIC"

    @classmethod
    def parse(cls, text) -> "IdentityId":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).upper())
        except ValueError:
            raise ValueError(
                f"unknown identity {text!r}; choose from {', '.join(i.value for i in cls)}"
            ) from None


@dataclass(frozen=True)
class _EigenIdentity:
    loop: str
    printed_weight: int = 2  # power of Pi(changed k) in the printed sum
    phases: str = "none"  # none | amplitude | line


_EIGEN = {
    IdentityId.FI6J: _EigenIdentity("tetra_bcd"),
    IdentityId.FI6J_S: _EigenIdentity("tetra_bcd"),
    IdentityId.I6J12J: _EigenIdentity("tetra_bcda"),
    IdentityId.CUBE_12_12: _EigenIdentity("cube_abcd"),
    IdentityId.CUBE_12_18: _EigenIdentity("cube_abfgcda", printed_weight=1),
    IdentityId.TORUS_18_18: _EigenIdentity("torus_abcd", phases="amplitude"),
    IdentityId.TORUS_LINE_12_12: _EigenIdentity("torus_line_ada", phases="line"),
}

_V2_LABELS = ("j1", "j2", "j3", "l1", "l2", "l3", "x")


@dataclass(frozen=True)
class Failure:
    tuple: tuple[tuple[str, int], ...]  # (label, twice-value) in label order
    lhs: SurdSum
    rhs: SurdSum
    residual: SurdSum

    def tuple_text(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.tuple)

    def to_dict(self) -> dict:
        return {
            "tuple": self.tuple_text(),
            "lhs": format_surd(self.lhs),
            "rhs": format_surd(self.rhs),
            "residual": format_surd(self.residual),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Failure":
        tup = []
        for part in d["tuple"].split(","):
            if part:
                k, v = part.split("=")
                tup.append((k, int(v)))
        return cls(tuple(tup), parse_surd(d["lhs"]), parse_surd(d["rhs"]), parse_surd(d["residual"]))


@dataclass
class IdentityReport:
    identity: str
    params: dict
    tuples_checked: int
    failures: list[Failure]
    elapsed_ms: float | None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "params": self.params,
            "tuples_checked": self.tuples_checked,
            "failures": [f.to_dict() for f in self.failures],
            "elapsed_ms": self.elapsed_ms,
            "stats": self.stats,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IdentityReport":
        d = json.loads(text)
        return cls(
            d["identity"],
            d["params"],
            d["tuples_checked"],
            [Failure.from_dict(f) for f in d["failures"]],
            d["elapsed_ms"],
            d.get("stats", {}),
        )

    def summary(self) -> str:
        lines = [
            f"identity: {self.identity}",
            "params: " + ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())),
            f"tuples_checked: {self.tuples_checked}",
            f"failures: {len(self.failures)}",
        ]
        for k, v in sorted(self.stats.items()):
            lines.append(f"{k}: {v}")
        if self.elapsed_ms is not None:
            lines.append(f"elapsed_ms: {self.elapsed_ms:.0f}")
        return "\n".join(lines)


def residual(lhs: SurdSum, rhs: SurdSum) -> SurdSum:
    """Exact LHS - RHS."""
    return lhs - rhs


# --------------------------------------------------------------- evaluation

def _pi_pow(K, edges, power: int) -> SurdSum:
    p = 1
    for e in edges:
        p *= K[e] + 1
    if power == 2:
        return SurdSum.rational(p)
    return surd_from(1, p)


def _phase_line(K, p: int) -> int:
    # (-1)^(2 p k2a) with k2a stored twice
    return -1 if (p * K["j2a"]) % 2 else 1


def _eigen_terms(ctx: dict, J: dict[str, int]):
    """(list of (K, term), rhs, rhs phase) for one fixed-side tuple."""
    rule = _EIGEN[IdentityId(ctx["id"])]
    loop = LOOPS[rule.loop]
    lat = build_lattice(loop.lattice)
    st = ctx["s"]
    sector = TopologicalSector(*ctx["sector"])
    chain = ctx["form"] == "chain"
    pad = ctx.get("pad", 0)
    power = 2 if chain else rule.printed_weight
    changed = loop.changed_edges

    def phase(X):
        if rule.phases == "amplitude":
            return _sector_sign(X, sector)
        if rule.phases == "line":
            return _phase_line(X, sector.p)
        return 1

    terms = []
    for K in loop_window(loop, J, st, pad):
        if not _admissible_tw(lat, K):
            continue
        in_window = all(_tri(J[e], K[e], st) for e in changed)
        # the printed sums carry the triad indicators explicitly; the chain form
        # gets its zeros from the 6j triangles when the window is widened
        if not in_window and (not chain or pad == 0):
            continue
        A = _bare_tw(lat.kind, K)
        if not A:
            continue
        rows = _bracket_rows(loop, J, K)
        if chain:
            B = _chain_term(*rows, st)
            if B:
                B = B * _bracket_sign_tw(loop, lat, J, K, st)
        else:
            B = _second_kind_tw(*rows)
        if not B:
            continue
        terms.append((K, B * A * _pi_pow(K, changed, power) * phase(K)))
    lam = 1
    if ctx["eigenvalue"] == "sector":
        lam = sector_eigenvalue(loop, HalfInt(st), sector)
    rhs_phase = phase(J) * lam
    AJ = _bare_tw(lat.kind, J) if _admissible_tw(lat, J) else SurdSum()
    rhs = AJ * ((st + 1) ** 2 * rhs_phase)
    return terms, rhs, rhs_phase


def _check_eigen(ctx, J):
    terms, rhs, ph = _eigen_terms(ctx, J)
    lhs = SurdSum()
    for _, t in terms:
        lhs = lhs + t
    stats = {}
    if rhs:
        stats["nonzero_rhs"] = 1
        if ph < 0:
            stats["negative_phase_tuples"] = 1
    return lhs, rhs, stats


def _check_meve(ctx, J):
    loop = LOOPS[ctx["loop"]]
    lat = build_lattice(loop.lattice)
    st = ctx["s"]
    sector = TopologicalSector(*ctx["sector"])
    lhs = SurdSum()
    for K in loop_window(loop, J, st, ctx.get("pad", 0)):
        m = _melem_tw(loop, lat, J, K, st)
        if m:
            lhs = lhs + m * _amplitude_tw(lat, K, sector)
    lam = sector_eigenvalue(loop, HalfInt(st), sector)
    rhs = _amplitude_tw(lat, J, sector) * lam
    return lhs, rhs, {"nonzero_rhs": 1} if rhs else {}


def _check_iterated(ctx, J):
    loop = LOOPS[ctx["loop"]]
    lat = build_lattice(loop.lattice)
    st = ctx["s"]
    sector = TopologicalSector(*ctx["sector"])
    q = ctx["iterations"]
    memo: list[dict] = [dict() for _ in range(q + 1)]

    def f(level, X):
        key = tuple(sorted(X.items()))
        hit = memo[level].get(key)
        if hit is not None:
            return hit
        if level == 0:
            v = _amplitude_tw(lat, X, sector)
        else:
            v = SurdSum()
            for K in loop_window(loop, X, st):
                m = _melem_tw(loop, lat, X, K, st)
                if m:
                    v = v + m * f(level - 1, K)
        memo[level][key] = v
        return v

    lhs = f(q, J)
    lam = sector_eigenvalue(loop, HalfInt(st), sector) ** q
    rhs = _amplitude_tw(lat, J, sector) * lam
    return lhs, rhs, {"nonzero_rhs": 1} if rhs else {}


def _window(a: int, b: int) -> range:
    return range(abs(a - b), a + b + 1, 2)


def _check_v2(ctx, T):
    j1, j2, j3, l1, l2, l3, x = (T[k] for k in _V2_LABELS)
    lhs = SurdSum()
    for k1 in _window(j1, x):
        for k2 in _window(j2, x):
            t1 = _sixj(j1, k1, x, k2, j2, l3)
            if not t1:
                continue
            for k3 in _window(j3, x):
                t = _sixj(j2, k2, x, k3, j3, l1)
                if not t:
                    continue
                t = t * t1 * _sixj(j3, k3, x, k1, j1, l2)
                if not t:
                    continue
                t = t * _sixj(l1, l2, l3, k1, k2, k3)
                if not t:
                    continue
                R = j1 + j2 + j3 + l1 + l2 + l3 + k1 + k2 + k3
                lhs = lhs + t * ((k1 + 1) * (k2 + 1) * (k3 + 1) * _sign(R + x))
    rhs = _sixj(l1, l2, l3, j1, j2, j3) * (x + 1)
    return lhs, rhs, {"nonzero_rhs": 1} if rhs else {}


_CHECKERS = {
    IdentityId.ITERATED: _check_iterated,
    IdentityId.V2: _check_v2,
    IdentityId.MEVE_GENERIC: _check_meve,
}


def _check(ctx, J):
    fn = _CHECKERS.get(IdentityId(ctx["id"]), _check_eigen)
    return fn(ctx, J)


def _run_chunk(args):
    ctx, labels, chunk = args
    failures = []
    stats: dict[str, int] = {}
    for J in chunk:
        lhs, rhs, st = _check(ctx, J)
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
        r = lhs - rhs
        if r:
            failures.append((tuple((l, J[l]) for l in labels), lhs, rhs, r))
    return failures, stats


def _sweep(ctx, labels, tuples: Sequence[dict], threads: int):
    n = len(tuples)
    if threads <= 1 or n < 2:
        results = [_run_chunk((ctx, labels, tuples))]
    else:
        size = max(1, -(-n // (threads * 4)))
        chunks = [tuples[i:i + size] for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_chunk, [(ctx, labels, c) for c in chunks]))
    failures = []
    stats: dict[str, int] = {}
    for f, st in results:
        failures.extend(f)
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
    failures.sort(key=lambda f: tuple(v for _, v in f[0]))
    return [Failure(*f) for f in failures], stats


# ----------------------------------------------------------------- frontend

def _lattice_of(ident: IdentityId, loop: str | None) -> str | None:
    if ident in _EIGEN:
        return LOOPS[_EIGEN[ident].loop].lattice
    if ident == IdentityId.V2:
        return None
    return LOOPS[loop].lattice


def _tuples(ident, lattice, jmax2, sample, seed):
    if lattice is None:
        rng = range(jmax2 + 1)
        out = [dict(zip(_V2_LABELS, t)) for t in product(rng, repeat=len(_V2_LABELS))]
        if sample is not None:
            import random

            r = random.Random(seed)
            out = r.sample(out, min(sample, len(out)))
            out.sort(key=lambda d: tuple(d[k] for k in _V2_LABELS))
        return out, _V2_LABELS
    lat = build_lattice(lattice)
    return [dict(a.tw) for a in enumerate_assignments(lat, HalfInt(jmax2), sample, seed)], lat.labels


def verify(
    identity,
    jmax,
    s=HalfInt(1),
    sector: TopologicalSector = TRIVIAL,
    sample=AUTO,
    seed: int = 0,
    *,
    form: str = "chain",
    eigenvalue: str = "printed",
    loop: str | None = None,
    iterations: int = 3,
    omega=0,
    window_pad: int = 0,
    threads: int = 1,
    timing: bool = True,
) -> IdentityReport:
    """Sweep one identity over admissible fixed-side tuples with spins <= jmax.

    ``sample`` is an int for seeded uniform sampling, None for exhaustive
    enumeration, or "auto": exhaustive on the tetrahedron and for V2, 500 samples
    on the cube and torus.  ``eigenvalue`` only matters for TORUS_LINE_12_12:
    "printed" keeps the phases exactly as printed, "sector" multiplies the right
    side by the line's eigenvalue on the sector ground state.  ``loop`` selects the
    operator for MEVE_GENERIC and ITERATED (default tetra_bcd).  ``window_pad``
    widens the k windows by that many steps on each side.
    """
    t0 = time.perf_counter()
    ident = IdentityId.parse(identity)
    if omega not in (0, "0") and float(omega) != 0.0:
        raise ValueError("only the omega = 0 ground state is supported")
    if form not in ("chain", "printed"):
        raise ValueError(f"form must be 'chain' or 'printed', not {form!r}")
    if eigenvalue not in ("printed", "sector"):
        raise ValueError(f"eigenvalue must be 'printed' or 'sector', not {eigenvalue!r}")
    if isinstance(sector, str):
        sector = TopologicalSector.parse(sector)
    jmax2 = half(jmax).twice
    st = half(s).twice
    if jmax2 < 0:
        raise ValueError("jmax must be non-negative")
    if ident != IdentityId.V2 and st < 1:
        raise ValueError("the loop representation needs s >= 1/2")
    if ident == IdentityId.FI6J and st != 1:
        raise ValueError("FI6J is the s = 1/2 identity; use FI6J_S for other s")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if window_pad < 0:
        raise ValueError("window_pad must be >= 0")
    if ident in (IdentityId.ITERATED, IdentityId.MEVE_GENERIC):
        loop = get_loop(loop or "tetra_bcd").name
    elif loop is not None:
        raise ValueError(f"{ident.value} fixes its own loop; --loop applies to ITERATED and MEVE_GENERIC")
    lattice = _lattice_of(ident, loop)
    if not sector.trivial and lattice != "torus2":
        raise ValueError(f"{ident.value} lives off the torus; only sector 0,0 is meaningful")
    if sample == AUTO:
        sample = DEFAULT_SAMPLE if lattice in ("cube", "torus2") else None
    if sample is not None and sample < 1:
        raise ValueError("sample must be a positive count")

    ctx = {
        "id": ident.value,
        "s": st,
        "sector": (sector.p, sector.q),
        "form": form,
        "eigenvalue": eigenvalue,
        "loop": loop,
        "iterations": iterations,
        "pad": window_pad,
    }
    tuples, labels = _tuples(ident, lattice, jmax2, sample, seed)
    failures, stats = _sweep(ctx, labels, tuples, threads)

    params = {"jmax": str(HalfInt(jmax2)), "seed": seed,
              "sample": "exhaustive" if sample is None else sample}
    if ident != IdentityId.V2:
        params["s"] = str(HalfInt(st))
    if lattice == "torus2":
        params["sector"] = str(sector)
    if ident in _EIGEN:
        params["form"] = form
    if ident == IdentityId.TORUS_LINE_12_12:
        params["eigenvalue"] = eigenvalue
    if loop is not None:
        params["loop"] = loop
    if ident == IdentityId.ITERATED:
        params["q"] = iterations
    if window_pad:
        params["window_pad"] = window_pad
    elapsed = (time.perf_counter() - t0) * 1000 if timing else None
    return IdentityReport(ident.value, params, len(tuples), failures, elapsed, stats)


# ------------------------------------------------------- structural checks

def phase_cancellation_check(
    jmax, s=HalfInt(1), sample=AUTO, seed: int = 0, timing: bool = True
) -> IdentityReport:
    """Sector phases of K and J agree on every nonzero plaquette term, in all four sectors.

    A failure lists J followed by the offending K spins (prefixed ``k_``); lhs is the
    K phase, rhs the J phase.
    """
    t0 = time.perf_counter()
    st = half(s).twice
    jmax2 = half(jmax).twice
    loop = LOOPS["torus_abcd"]
    lat = build_lattice("torus2")
    if sample == AUTO:
        sample = DEFAULT_SAMPLE
    tuples, labels = _tuples(None, "torus2", jmax2, sample, seed)
    failures = []
    terms = 0
    sectors = [TopologicalSector(p, q) for p in (0, 1) for q in (0, 1)]
    for J in tuples:
        for K in loop_window(loop, J, st):
            if not _melem_tw(loop, lat, J, K, st):
                continue
            terms += 1
            for sec in sectors:
                a, b = _sector_sign(K, sec), _sector_sign(J, sec)
                if a != b:
                    tup = tuple((l, J[l]) for l in labels) + tuple(
                        (f"k_{e}", K[e]) for e in loop.changed_edges
                    ) + (("p", sec.p), ("q", sec.q))
                    ra, rb = SurdSum.rational(a), SurdSum.rational(b)
                    failures.append(Failure(tup, ra, rb, ra - rb))
    params = {"jmax": str(HalfInt(jmax2)), "s": str(HalfInt(st)), "seed": seed,
              "sample": "exhaustive" if sample is None else sample, "check": "phase_cancellation"}
    elapsed = (time.perf_counter() - t0) * 1000 if timing else None
    return IdentityReport(IdentityId.TORUS_18_18.value, params, len(tuples), failures,
                          elapsed, {"terms_checked": terms})


# torus label -> cube label under which the sector-0 line identity becomes the
# cube face identity (a graph isomorphism of the two lattices)
TORUS_TO_CUBE = {
    "ja": "j1", "j1a": "j5", "j2a": "j2",
    "jb": "j9", "j1b": "j8", "j2b": "j12",
    "jc": "j11", "j1c": "j6", "j2c": "j10",
    "jd": "j3", "j1d": "j7", "j2d": "j4",
}


def relabel_check(
    jmax=HalfInt(2), s=HalfInt(1), sample=200, seed: int = 0, timing: bool = True
) -> IdentityReport:
    """Sector-0 TORUS_LINE_12_12 instances equal CUBE_12_12 instances after relabeling.

    Per tuple, the right sides and every k-term may differ by one common sign (the
    12j symmetry used in the relabeling); anything else is a failure.
    """
    t0 = time.perf_counter()
    st = half(s).twice
    jmax2 = half(jmax).twice
    tuples, labels = _tuples(None, "torus2", jmax2, sample, seed)
    base = {"s": st, "sector": (0, 0), "form": "chain", "eigenvalue": "printed"}
    tctx = dict(base, id=IdentityId.TORUS_LINE_12_12.value)
    cctx = dict(base, id=IdentityId.CUBE_12_12.value)
    failures = []
    for J in tuples:
        C = {TORUS_TO_CUBE[k]: v for k, v in J.items()}
        tterms, trhs, _ = _eigen_terms(tctx, J)
        cterms, crhs, _ = _eigen_terms(cctx, C)
        tmap = {tuple(sorted((TORUS_TO_CUBE[k], v) for k, v in K.items())): t for K, t in tterms}
        cmap = {tuple(sorted(K.items())): t for K, t in cterms}
        pairs = [(trhs, crhs)] + [(tmap.get(k, SurdSum()), cmap.get(k, SurdSum()))
                                  for k in sorted(set(tmap) | set(cmap))]
        eps = None
        bad = False
        for a, b in pairs:
            if not a and not b:
                continue
            if eps is None:
                eps = 1 if a == b else (-1 if a == -b else 0)
            if eps == 0 or a != b * eps:
                bad = True
                break
        if bad:
            failures.append(Failure(tuple((l, J[l]) for l in labels), trhs, crhs, trhs - crhs))
    params = {"jmax": str(HalfInt(jmax2)), "s": str(HalfInt(st)), "seed": seed,
              "sample": "exhaustive" if sample is None else sample, "check": "relabel"}
    elapsed = (time.perf_counter() - t0) * 1000 if timing else None
    return IdentityReport(IdentityId.TORUS_LINE_12_12.value, params, len(tuples), failures, elapsed)
