"""Exact SU(2) recoupling coefficients, spin-network amplitudes and Wilson-loop identities."""

from .exact import HalfInt, SurdSum, format_surd, half, parse_surd, surd_from
from .lattices import (
    SpinAssignment,
    TopologicalSector,
    admissible,
    amplitude,
    build_lattice,
    enumerate_assignments,
)
from .second_kind import SecondKindBracket, second_kind, single_x_reduction
from .verify import IdentityId, IdentityReport, phase_cancellation_check, relabel_check, residual, verify
from .wigner import clebsch_gordan, pi_factor, triangle, wigner_3j, wigner_6j
from .wilson import LOOPS, bracket_form, get_loop, matrix_element, overlap

__version__ = "0.1.0"

__all__ = [
    "HalfInt", "SurdSum", "format_surd", "half", "parse_surd", "surd_from",
    "SpinAssignment", "TopologicalSector", "admissible", "amplitude", "build_lattice",
    "enumerate_assignments",
    "SecondKindBracket", "second_kind", "single_x_reduction",
    "IdentityId", "IdentityReport", "phase_cancellation_check", "relabel_check", "residual", "verify",
    "clebsch_gordan", "pi_factor", "triangle", "wigner_3j", "wigner_6j",
    "LOOPS", "bracket_form", "get_loop", "matrix_element", "overlap",
]
