"""Zeros of iterated derivatives of ``(P/Q) exp(T)`` and their Voronoi-skeleton limit.

The modules split along the pipeline:

``gauss_poly``
    exact polynomials over Q(i), the derivative recursion and its closed forms
``rootfind``
    multiprecision Aberth roots, certification, empirical zero measures
``voronoi``
    Voronoi diagram of the poles with parameterized edges
``potential``
    the limit potential, the skeleton measure and the convergence diagnostics
``cli``
    config-driven experiment runner
"""

from .gauss_poly import (
    ConstantExponentError,
    DerivativeSequence,
    GaussianRational,
    HypothesisViolation,
    Polynomial,
    ProblemInstance,
    ResourceLimitExceeded,
    generate_sequence,
)
from .potential import LimitPotentialSpec, muS_log_potential, psi, total_mass
from .rootfind import EmpiricalMeasure, RootSet, certify_roots, empirical_measure, find_roots
from .voronoi import VoronoiDiagram, build_voronoi

__version__ = "0.1.0"

__all__ = [
    "ConstantExponentError",
    "DerivativeSequence",
    "EmpiricalMeasure",
    "GaussianRational",
    "HypothesisViolation",
    "LimitPotentialSpec",
    "Polynomial",
    "ProblemInstance",
    "ResourceLimitExceeded",
    "RootSet",
    "VoronoiDiagram",
    "build_voronoi",
    "certify_roots",
    "empirical_measure",
    "find_roots",
    "generate_sequence",
    "muS_log_potential",
    "psi",
    "total_mass",
]
