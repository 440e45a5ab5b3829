from itertools import product

import pytest

from su2net.exact import HalfInt, surd_from
from su2net.lattices import (
    SpinAssignment,
    TopologicalSector,
    admissible,
    amplitude,
    build_lattice,
    count_assignments,
    enumerate_assignments,
)
from su2net.wigner import wigner_6j

T = SpinAssignment.from_twice


def tetra(*tw):
    return T({f"j{i + 1}": v for i, v in enumerate(tw)})


def test_graph_shapes():
    t = build_lattice("tetrahedron")
    assert len(t.vertices) == 4 and len(t.edges) == 6
    assert set(t.endpoints("j3")) == {"a", "b"}
    assert set(t.triads["a"]) == {"j1", "j2", "j3"}
    c = build_lattice("cube")
    assert len(c.vertices) == 8 and len(c.edges) == 12
    assert set(c.triads["a"]) == {"j1", "j2", "j5"}
    tor = build_lattice("torus2")
    assert len(tor.vertices) == 4 and len(tor.edges) == 8
    assert set(tor.edge_classes["p_phase"]) == {"j2a", "j2b"}
    assert set(tor.edge_classes["q_phase"]) == {"j1a", "j1d"}
    assert build_lattice("tetra") is t
    with pytest.raises(ValueError):
        build_lattice("hexagon")


def test_admissible():
    t = build_lattice("tetra")
    assert admissible(t, tetra(0, 0, 0, 0, 0, 0))
    assert admissible(t, tetra(1, 1, 2, 1, 1, 2))
    # vertex a with (1/2, 0, 1)
    assert not admissible(t, tetra(1, 0, 2, 2, 0, 1))
    with pytest.raises(ValueError, match="missing"):
        admissible(t, T({"j1": 0}))


def test_amplitude_examples():
    t = build_lattice("tetra")
    assert amplitude(t, tetra(0, 0, 0, 0, 0, 0)) == 1
    assert amplitude(t, tetra(2, 2, 2, 2, 2, 2)) == wigner_6j(1, 1, 1, 1, 1, 1) * 27
    assert amplitude(t, tetra(1, 0, 2, 2, 0, 1)) == 0  # inadmissible gives 0
    with pytest.raises(ValueError, match="torus"):
        amplitude(t, tetra(0, 0, 0, 0, 0, 0), TopologicalSector(1, 0))


def test_enumeration_counts():
    # counts were fixed by a brute-force triangle filter over all tuples
    assert count_assignments(build_lattice("tetra"), 0) == 1
    assert count_assignments(build_lattice("tetra"), HalfInt(1)) == 8
    assert count_assignments(build_lattice("tetra"), 1) == 47
    assert count_assignments(build_lattice("torus2"), HalfInt(1)) == 32
    assert count_assignments(build_lattice("cube"), HalfInt(1)) == 32


@pytest.mark.parametrize("kind", ["tetrahedron", "torus2"])
def test_enumeration_matches_brute_force(kind):
    lat = build_lattice(kind)
    brute = []
    for t in product(range(3), repeat=len(lat.labels)):
        tw = dict(zip(lat.labels, t))
        if admissible(lat, T(tw)):
            brute.append(tw)
    got = [a.tw for a in enumerate_assignments(lat, 1)]
    assert got == brute  # same set, same lexicographic order


def test_sampling_is_seeded_and_distinct():
    lat = build_lattice("cube")
    a = list(enumerate_assignments(lat, HalfInt(3), sample=40, seed=7))
    b = list(enumerate_assignments(lat, HalfInt(3), sample=40, seed=7))
    assert a == b
    assert len(set(a)) == 40
    assert all(admissible(lat, x) for x in a)
    c = list(enumerate_assignments(lat, HalfInt(3), sample=40, seed=8))
    assert a != c


def test_sector_phases():
    lat = build_lattice("torus2")
    for J in enumerate_assignments(lat, HalfInt(3), sample=60, seed=1):
        base = amplitude(lat, J)
        for p, q in product((0, 1), repeat=2):
            v = amplitude(lat, J, TopologicalSector(p, q))
            assert v == base or v == -base
            tw = J.tw
            flip = (p * (tw["j2a"] + tw["j2b"]) + q * (tw["j1a"] + tw["j1d"])) % 2
            assert v == (-base if flip else base)
    # integer spins: every sector agrees
    for J in enumerate_assignments(lat, 1):
        if all(v % 2 == 0 for v in J.tw.values()):
            assert amplitude(lat, J, TopologicalSector(1, 1)) == amplitude(lat, J)


def test_cube_amplitude_equals_relabeled_torus_amplitude():
    from su2net.verify import TORUS_TO_CUBE

    tor, cube = build_lattice("torus2"), build_lattice("cube")
    n = 0
    for J in enumerate_assignments(tor, 1):
        C = T({TORUS_TO_CUBE[k]: v for k, v in J.tw.items()})
        assert admissible(cube, C)
        a, b = amplitude(tor, J), amplitude(cube, C)
        assert a == b or a == -b
        n += 1
    assert n == count_assignments(cube, 1)


def test_assignment_text():
    a = SpinAssignment.parse("j1=1, j2=3")
    assert a.tw == {"j1": 1, "j2": 3}
    assert a["j2"] == HalfInt(3)
    assert a.to_text() == "j1=1,j2=3"
    assert a.replace(j1=2).tw["j1"] == 2
    for bad in ("j1", "j1=x", "j1=-1"):
        with pytest.raises(ValueError):
            SpinAssignment.parse(bad)
    assert TopologicalSector.parse("1,0") == TopologicalSector(1, 0)
    with pytest.raises(ValueError):
        TopologicalSector.parse("2,0")
