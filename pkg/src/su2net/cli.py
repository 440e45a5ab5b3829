"""Command-line front end: ``su2net <command> ...``.

Exit status is 0 on success, 1 when a verification sweep finds failures and 2 on
any argument or domain error.  Errors go to stderr as ``error: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from itertools import product

from .exact import HalfInt, SurdSum, format_surd
from .lattices import SpinAssignment, TopologicalSector, amplitude, build_lattice, lattice_kind
from .second_kind import SecondKindBracket, second_kind, single_x_reduction
from .verify import AUTO, IdentityId, verify
from .wigner import _sixj, _tri, load_sixj_cache, save_sixj_cache, wigner_6j
from .wilson import LOOPS, get_loop, matrix_element

CACHE_ENV = "SU2NET_SIXJ_CACHE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def approx(v: SurdSum) -> str:
    return f"{float(v):#.15g}"


def _spin(text: str, twice: bool) -> HalfInt:
    try:
        if twice:
            t = int(text)
            if t < 0:
                raise ValueError
            return HalfInt(t)
        h = HalfInt.parse(text)
    except ValueError:
        raise UsageError(f"bad spin {text!r}" + (" (expected a twice-j integer)" if twice else "")) from None
    if h.twice < 0:
        raise UsageError(f"spins must be non-negative, got {text!r}")
    return h


def _assignment(text: str, lattice) -> SpinAssignment:
    try:
        a = SpinAssignment.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    missing = [e for e in lattice.labels if e not in a.tw]
    extra = [e for e in a.tw if e not in lattice.labels]
    if missing:
        raise UsageError(f"assignment is missing {', '.join(missing)}")
    if extra:
        raise UsageError(f"unknown labels for {lattice.kind}: {', '.join(extra)}")
    return a


def _sector(text: str | None) -> TopologicalSector:
    if text is None:
        return TopologicalSector(0, 0)
    try:
        return TopologicalSector.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit_value(v: SurdSum, as_json: bool, extra: dict | None = None):
    out = sys.stdout
    if as_json:
        d = dict(extra or {})
        d.update(value=format_surd(v), approx=float(v))
        out.write(json.dumps(d, sort_keys=True) + "\n")
    else:
        out.write(format_surd(v) + "\n")
        out.write(f"approx: {approx(v)}\n")


# ------------------------------------------------------------------ commands

def cmd_symbol(a) -> int:
    if a.kind == "6j":
        if len(a.spins) != 6:
            raise UsageError("symbol 6j takes exactly six spins")
        js = [_spin(x, a.twice) for x in a.spins]
        _emit_value(wigner_6j(*js), a.json, {"symbol": "6j", "args": [str(j) for j in js]})
        return 0
    if a.spins:
        raise UsageError("symbol 3nj2 takes its rows through --top, --mid and --bottom")
    rows = []
    for name in ("top", "mid", "bottom"):
        r = getattr(a, name)
        if r is None:
            raise UsageError(f"symbol 3nj2 needs --{name}")
        rows.append([_spin(x, a.twice) for x in r])
    if a.n is not None and any(len(r) != a.n for r in rows):
        raise UsageError(f"--n {a.n} does not match the row lengths")
    try:
        br = SecondKindBracket(*rows)
        if a.single_x is not None:
            v = single_x_reduction(br, _spin(a.single_x, a.twice))
        else:
            v = second_kind(br)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_value(v, a.json, {"symbol": f"{3 * br.n}j2", "bracket": str(br)})
    return 0


def cmd_amplitude(a) -> int:
    lat = build_lattice(a.lattice)
    J = _assignment(a.assign, lat)
    sec = _sector(a.sector)
    v = amplitude(lat, J, sec)
    _emit_value(v, a.json, {"lattice": lat.kind, "assignment": J.to_text(lat.labels),
                            "sector": str(sec)})
    return 0


def cmd_matel(a) -> int:
    loop = get_loop(a.loop)
    if lattice_kind(a.lattice) != loop.lattice:
        raise UsageError(f"loop {loop.name} lives on {loop.lattice}, not {lattice_kind(a.lattice)}")
    lat = build_lattice(loop.lattice)
    J = _assignment(a.J, lat)
    K = _assignment(a.K, lat)
    s = _spin(a.s, a.twice)
    r = matrix_element(loop, J, K, s)
    extra = {
        "loop": loop.name,
        "J": J.to_text(lat.labels),
        "K": K.to_text(lat.labels),
        "s": str(s),
        "deltas_satisfied": r.deltas_satisfied,
        "triads": [[e, str(j), str(k), str(x), ok] for e, j, k, x, ok in r.triads],
    }
    _emit_value(r.value, a.json, extra)
    if not a.json:
        sys.stdout.write(f"deltas_satisfied: {r.deltas_satisfied}\n")
        sys.stdout.write(f"triads_satisfied: {r.triads_satisfied}\n")
    return 0


def cmd_verify(a) -> int:
    ident = IdentityId.parse(a.identity)
    if a.exhaustive and a.sample is not None:
        raise UsageError("--sample and --exhaustive are exclusive")
    sample = None if a.exhaustive else (a.sample if a.sample is not None else AUTO)
    if a.threads < 1:
        raise UsageError("--threads must be >= 1")
    rep = verify(
        ident,
        _spin(a.jmax, a.twice),
        _spin(a.s, a.twice),
        _sector(a.sector),
        sample,
        a.seed,
        form=a.form,
        eigenvalue=a.eigenvalue,
        loop=a.loop,
        iterations=a.iterations,
        omega=a.omega,
        window_pad=a.window_pad,
        threads=a.threads,
        timing=not a.no_timing,
    )
    if a.json:
        sys.stdout.write(rep.to_json() + "\n")
    else:
        sys.stdout.write(rep.summary() + "\n")
        for f in rep.failures[: a.show]:
            sys.stdout.write(
                f"  {f.tuple_text()}: lhs={format_surd(f.lhs)} rhs={format_surd(f.rhs)} "
                f"residual={format_surd(f.residual)}\n"
            )
        if len(rep.failures) > a.show:
            sys.stdout.write(f"  ... {len(rep.failures) - a.show} more\n")
    return 0 if rep.ok else 1


def sixj_rows(jmax2: int):
    """(twice-key, value) for every admissible 6j with all entries <= jmax2/2."""
    rng = range(jmax2 + 1)
    for a, b, c in product(rng, repeat=3):
        if not _tri(a, b, c):
            continue
        for d, e, f in product(rng, repeat=3):
            if _tri(a, e, f) and _tri(d, b, f) and _tri(d, e, c):
                yield (a, b, c, d, e, f), _sixj(a, b, c, d, e, f)


def cmd_table(a) -> int:
    jmax = _spin(a.jmax, a.twice)
    n = 0
    with open(a.out, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j1", "j2", "j3", "j4", "j5", "j6", "value", "approx"])
        for key, v in sixj_rows(jmax.twice):
            w.writerow(list(key) + [format_surd(v), approx(v)])
            n += 1
    sys.stdout.write(f"wrote {n} rows to {a.out}\n")
    return 0


def cmd_cache(a) -> int:
    if not a.load and not a.save:
        raise UsageError("cache needs --load and/or --save")
    if a.load:
        n = load_sixj_cache(a.load, verify=a.verify)
        sys.stdout.write(f"loaded {n} entries from {a.load}\n")
    if a.warm is not None:
        for _ in sixj_rows(_spin(a.warm, a.twice).twice):
            pass
    if a.save:
        n = save_sixj_cache(a.save)
        sys.stdout.write(f"saved {n} entries to {a.save}\n")
    return 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="su2net", description="Exact SU(2) recoupling symbols, spin networks and Wilson-loop identities.")
    p.add_argument("--cache", default=os.environ.get(CACHE_ENV),
                   help=f"6j cache file loaded before and saved after the command (default ${CACHE_ENV})")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, twice=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if twice:
            sp.add_argument("--twice", action="store_true", help="spin arguments are twice-j integers")

    sp = sub.add_parser("symbol", help="6j or second-kind 3nj symbol")
    sp.add_argument("kind", choices=["6j", "3nj2"])
    sp.add_argument("spins", nargs="*")
    sp.add_argument("--n", type=int, choices=[3, 4, 6])
    sp.add_argument("--top", nargs="+")
    sp.add_argument("--mid", nargs="+")
    sp.add_argument("--bottom", nargs="+")
    sp.add_argument("--single-x", dest="single_x", metavar="S",
                    help="evaluate only the x = S term of the chain sum")
    common(sp)
    sp.set_defaults(func=cmd_symbol)

    sp = sub.add_parser("amplitude", help="ground-state amplitude of a spin-network state")
    sp.add_argument("--lattice", required=True, choices=["tetra", "tetrahedron", "cube", "torus", "torus2"])
    sp.add_argument("--assign", required=True, help="label=twice_j pairs, e.g. j1=1,j2=1,...")
    sp.add_argument("--sector", metavar="P,Q")
    common(sp, twice=False)
    sp.set_defaults(func=cmd_amplitude)

    sp = sub.add_parser("matel", help="Wilson loop/line matrix element")
    sp.add_argument("--lattice", required=True, choices=["tetra", "tetrahedron", "cube", "torus", "torus2"])
    sp.add_argument("--loop", required=True, choices=sorted(LOOPS))
    sp.add_argument("--J", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--s", required=True)
    common(sp)
    sp.set_defaults(func=cmd_matel)

    sp = sub.add_parser("verify", help="sweep one identity to exact zero residual")
    sp.add_argument("--identity", required=True, metavar="ID",
                    help=", ".join(i.value for i in IdentityId))
    sp.add_argument("--jmax", required=True)
    sp.add_argument("--s", default="1/2")
    sp.add_argument("--sector", metavar="P,Q")
    sp.add_argument("--sample", type=int)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--form", choices=["chain", "printed"], default="chain")
    sp.add_argument("--eigenvalue", choices=["printed", "sector"], default="printed")
    sp.add_argument("--loop", choices=sorted(LOOPS))
    sp.add_argument("--iterations", type=int, default=3)
    sp.add_argument("--omega", default="0")
    sp.add_argument("--window-pad", dest="window_pad", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--show", type=int, default=10, help="failures to print (text mode)")
    sp.add_argument("--no-timing", dest="no_timing", action="store_true",
                    help="omit elapsed time so repeated runs are byte-identical")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("table", help="CSV table of symbols")
    sp.add_argument("kind", choices=["6j"])
    sp.add_argument("--jmax", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--twice", action="store_true")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("cache", help="load or save the 6j memo table")
    sp.add_argument("--load", metavar="PATH")
    sp.add_argument("--save", metavar="PATH")
    sp.add_argument("--verify", action="store_true", help="recompute every loaded entry")
    sp.add_argument("--warm", metavar="JMAX", help="fill the table up to JMAX before saving")
    sp.add_argument("--twice", action="store_true")
    sp.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # positional spins after an option (``symbol 6j --twice 1 1 2 ...``)
        if extra and args.command == "symbol" and not any(x.startswith("--") for x in extra):
            args.spins = list(args.spins) + extra
        elif extra:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        if args.cache and os.path.exists(args.cache):
            load_sixj_cache(args.cache)
        status = args.func(args)
        if args.cache and status == 0:
            save_sixj_cache(args.cache)
        return status
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def run(argv=None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
