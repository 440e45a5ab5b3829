from fractions import Fraction

import pytest

from su2net.exact import HalfInt, SurdSum, parse_surd
from su2net.lattices import TopologicalSector
from su2net.verify import (
    IdentityId,
    IdentityReport,
    phase_cancellation_check,
    relabel_check,
    residual,
    verify,
)

HALF = HalfInt(1)


def test_residual_examples():
    a = parse_surd("1/3*sqrt(6) - 2")
    assert residual(a, a) == 0
    assert residual(parse_surd("sqrt(2)"), SurdSum()) == parse_surd("sqrt(2)")
    assert residual(parse_surd("1/2 + sqrt(3)"), parse_surd("sqrt(3)")) == Fraction(1, 2)


def test_identity_parse():
    assert IdentityId.parse("fi6j") is IdentityId.FI6J
    with pytest.raises(ValueError, match="unknown identity"):
        IdentityId.parse("FOO")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(identity="FI6J", jmax=1, s=1),
        dict(identity="FI6J", jmax=1, omega=1),
        dict(identity="CUBE_12_12", jmax=1, sector=TopologicalSector(1, 0)),
        dict(identity="FI6J", jmax=1, loop="cube_abcd"),
        dict(identity="FI6J_S", jmax=1, s=0),
        dict(identity="FI6J", jmax=-1),
        dict(identity="FI6J", jmax=1, form="other"),
        dict(identity="CUBE_12_12", jmax=1, sample=0),
        dict(identity="ITERATED", jmax=1, iterations=0),
        dict(identity="MEVE_GENERIC", jmax=1, loop="nope"),
    ],
)
def test_invalid_combinations(kwargs):
    with pytest.raises(ValueError):
        verify(**kwargs)


@pytest.mark.parametrize(
    "ident,kw",
    [
        ("FI6J", dict(jmax=1)),
        ("FI6J_S", dict(jmax=1, s=1)),
        ("FI6J_S", dict(jmax=1, s=HalfInt(3))),
        ("I6J12J", dict(jmax=1)),
        ("CUBE_12_12", dict(jmax=1, sample=20)),
        ("CUBE_12_18", dict(jmax=1, sample=20)),
        ("TORUS_18_18", dict(jmax=1, sample=20, sector=TopologicalSector(1, 1))),
        ("TORUS_LINE_12_12", dict(jmax=1, sample=20)),
        ("TORUS_LINE_12_12", dict(jmax=1, sample=20, sector=TopologicalSector(0, 1))),
        ("ITERATED", dict(jmax=1, iterations=2)),
        ("ITERATED", dict(jmax=HALF, iterations=2, loop="cube_abcd", sample=5)),
        ("V2", dict(jmax=HALF)),
        ("MEVE_GENERIC", dict(jmax=1, s=1)),
        ("MEVE_GENERIC", dict(jmax=1, loop="torus_line_aba", sample=10)),
    ],
)
def test_small_sweeps_hold(ident, kw):
    rep = verify(ident, **kw)
    assert rep.tuples_checked > 0
    assert rep.ok, rep.failures[:3]


def test_window_pad_changes_nothing():
    assert verify("FI6J", 1, window_pad=1).ok


def test_printed_form_failures_are_reported():
    rep = verify("FI6J", 1, form="printed")
    assert rep.failures
    f = rep.failures[0]
    assert f.residual == f.lhs - f.rhs and f.residual != 0
    assert rep.params["form"] == "printed"


def test_torus_line_sector_eigenvalue():
    sec = TopologicalSector(1, 0)
    printed = verify("TORUS_LINE_12_12", 1, sector=sec, sample=30, seed=1)
    assert printed.failures
    assert verify("TORUS_LINE_12_12", 1, sector=sec, sample=30, seed=1, eigenvalue="sector").ok


def test_json_round_trip():
    rep = verify("FI6J", 1, form="printed", timing=False)
    text = rep.to_json()
    back = IdentityReport.from_json(text)
    assert back.to_json() == text
    assert back.failures == rep.failures
    assert back.elapsed_ms is None


def test_threads_match_serial():
    a = verify("FI6J", HalfInt(3), form="printed", timing=False)
    b = verify("FI6J", HalfInt(3), form="printed", timing=False, threads=2)
    assert a.to_json() == b.to_json()


def test_sampling_is_seeded():
    a = verify("CUBE_12_12", 1, sample=5, seed=3, timing=False)
    b = verify("CUBE_12_12", 1, sample=5, seed=3, timing=False)
    assert a.to_json() == b.to_json()
    assert a.params["sample"] == 5


def test_structural_checks():
    rep = phase_cancellation_check(1, sample=20, timing=False)
    assert rep.ok and rep.stats["terms_checked"] > 0
    assert relabel_check(1, sample=20).ok
