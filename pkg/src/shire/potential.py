"""Limit potential, empirical potentials and the skeleton measure.

For ``f = (P/Q) exp(T)`` with simple poles ``z_1..z_q`` the shifted
logarithmic potentials of the zeros of ``P_n`` tend to::

    Psi(z) = (max_i log|z - z_i|^-1 + log|Q(z)| - log(|c_q| |d_t| t)) / (q + t - 1)

Writing ``Q = c_q prod (z - z_k)`` and cancelling the nearest factor gives
the form used here, which stays finite at the poles::

    Psi(z) = (sum_{k != i*(z)} log|z - z_k| - log(|d_t| t)) / (q + t - 1)

The asymptotic zero measure lives on the Voronoi skeleton.  On the edge
between ``z_i`` and ``z_j``, with ``zeta = m + s (|z_i - z_j|/2) u``, its
density is ``ds / (pi (q+t-1) (1 + s^2))``, so each edge carries mass
``(arctan s_b - arctan s_a) / (pi (q+t-1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .gauss_poly import DerivativeSequence, ProblemInstance
from .rootfind import EmpiricalMeasure, RootSet
from .voronoi import Edge, VoronoiDiagram, build_voronoi, distances_to_skeleton

__all__ = [
    "AtomHit",
    "QuadratureFailure",
    "NormalizationViolated",
    "LimitPotentialSpec",
    "PotentialField",
    "L1Estimate",
    "HarmonicityReport",
    "SubharmonicityReport",
    "GrowthBoundSeries",
    "psi",
    "psi_values",
    "shifted_empirical_potential",
    "shifted_empirical_values",
    "edge_density",
    "edge_mass",
    "total_mass",
    "muS_log_potential",
    "l1_discrepancy",
    "stencil_laplacian",
    "harmonicity_check",
    "subharmonicity_check",
    "sup_error",
    "growth_bound_series",
    "potential_grid",
    "write_field_csv",
]


class AtomHit(ValueError):
    """Evaluation point coincides with an atom of the measure."""


class QuadratureFailure(RuntimeError):
    pass


class NormalizationViolated(ValueError):
    """Instance is not normalised: need Q(0) = 0 and no other pole in |z| <= 2."""


@dataclass(frozen=True)
class LimitPotentialSpec:
    zeros: tuple[complex, ...]
    c_q: complex
    d_t: complex
    q: int
    t: int
    p: int = 0

    def __post_init__(self):
        if self.t < 1 or self.q < 2:
            raise ValueError("need q >= 2 and t >= 1")
        if len(self.zeros) != self.q:
            raise ValueError("number of zeros must equal q")

    @classmethod
    def from_instance(cls, instance: ProblemInstance) -> LimitPotentialSpec:
        return cls(
            tuple(complex(z) for z in instance.Q_zeros),
            complex(instance.c_q),
            complex(instance.d_t),
            instance.q,
            instance.t,
            instance.p,
        )

    @classmethod
    def from_sites(cls, sites: Sequence, t: int = 1, d_t: complex = 1, c_q: complex = 1, p: int = 0):
        z = tuple(complex(s) for s in sites)
        return cls(z, complex(c_q), complex(d_t), len(z), t, p)

    @property
    def denom(self) -> int:
        return self.q + self.t - 1

    @property
    def D(self) -> float:
        return math.log(abs(self.d_t) * self.t) / self.denom

    @property
    def mass(self) -> float:
        return (self.q - 1) / self.denom


@dataclass
class PotentialField:
    points: np.ndarray   # complex sample locations
    values: np.ndarray
    kind: str            # closed_form_psi | empirical_shifted | quadrature_L
    h: float


# --------------------------------------------------------------------------
# point evaluations
# --------------------------------------------------------------------------


def psi_values(points, spec: LimitPotentialSpec) -> np.ndarray:
    """Vectorised limit potential; finite everywhere including at the poles."""
    pts = np.asarray(points, dtype=complex)
    zs = np.asarray(spec.zeros, dtype=complex)
    dist = np.abs(pts[..., None] - zs)
    nearest = np.argmin(dist, axis=-1)
    mask = np.ones_like(dist, dtype=bool)
    np.put_along_axis(mask, nearest[..., None], False, axis=-1)
    with np.errstate(divide="ignore"):
        logs = np.where(mask, np.log(np.where(mask, dist, 1.0)), 0.0)
    return (logs.sum(axis=-1) - math.log(abs(spec.d_t) * spec.t)) / spec.denom


def psi(z, spec: LimitPotentialSpec) -> float:
    return float(psi_values(np.array([complex(z)]), spec)[0])


def shifted_empirical_values(points, roots: np.ndarray, n: int, m_n: int | None = None) -> np.ndarray:
    """``(sum_k log|z - alpha_k| - log n!) / m_n`` on an array of points."""
    pts = np.asarray(points, dtype=complex)
    alpha = np.asarray(roots, dtype=complex)
    m = len(alpha) if m_n is None else m_n
    acc = np.zeros(pts.shape)
    with np.errstate(divide="ignore"):
        for a in alpha:
            acc += np.log(np.abs(pts - a))
    return (acc - gammaln(n + 1)) / m


def shifted_empirical_potential(z, measure: EmpiricalMeasure, n: int) -> float:
    z = complex(z)
    alpha = measure.locations()
    scale = max(1.0, abs(z), float(np.max(np.abs(alpha))) if len(alpha) else 1.0)
    if len(alpha) and np.min(np.abs(z - alpha)) < 1e-14 * scale:
        raise AtomHit(f"{z} coincides with a zero of P_{n}")
    return float(shifted_empirical_values(np.array([z]), alpha, n, measure.m_n)[0])


# --------------------------------------------------------------------------
# skeleton measure
# --------------------------------------------------------------------------


def _edge_sites(edge: Edge) -> tuple[complex, complex]:
    off = 1j * edge.half_sep * edge.direction
    return edge.midpoint + off, edge.midpoint - off


def edge_density(zeta, edge: Edge, spec: LimitPotentialSpec) -> float:
    """Density of d^2 Psi / dzbar dz per unit length at ``zeta`` on the bisector."""
    zi, zj = _edge_sites(edge)
    zeta = complex(zeta)
    return abs(zi - zj) / (4 * spec.denom * abs((zeta - zi) * (zeta - zj)))


def edge_mass(edge: Edge, spec: LimitPotentialSpec, interval: tuple[float, float] | None = None) -> float:
    """Mass of the asymptotic zero measure on a parameter interval of an edge."""
    s_a, s_b = (edge.s_a, edge.s_b) if interval is None else interval
    if s_b <= s_a:
        return 0.0
    return (math.atan(s_b) - math.atan(s_a)) / (math.pi * spec.denom)


def total_mass(diagram: VoronoiDiagram, spec: LimitPotentialSpec) -> float:
    return math.fsum(edge_mass(e, spec) for e in diagram.edges)


def _tail_cutoff(dist_mid: float, half: float, budget: float) -> float:
    """Parameter ``S`` beyond which the integrand's tail is below ``budget``.

    For ``s >= S >= max(1, (1 + |z-m|)/r)`` one has
    ``0 <= log|z - zeta(s)| <= log s + log(|z-m| + r)``, and the tail of
    ``ds/(1+s^2)`` against that is at most ``(log S + 1 + c)/S``.
    """
    c = max(math.log(dist_mid + half), 0.0)
    S = max(1.0, (1.0 + dist_mid) / half, 2.0)
    while (math.log(S) + 1.0 + c) / S > budget:
        S *= 2.0
        if S > 1e15:
            raise QuadratureFailure(f"tail bound {budget:.3g} unreachable in double precision")
    return S


def _quad_piece(g, a, b, eps, label):
    val, err = integrate.quad(g, a, b, epsabs=eps, epsrel=1e-13, limit=400)
    if err > 10 * eps and err > 1e-12 * abs(val):
        raise QuadratureFailure(f"edge {label}: error estimate {err:.3g} > {eps:.3g}")
    return val


def muS_log_potential(
    z,
    diagram: VoronoiDiagram,
    spec: LimitPotentialSpec,
    quad_tol: float = 1e-9,
) -> float:
    """``L(z) = int log|z - zeta| dmu_S(zeta)`` by adaptive quadrature.

    On the bounded part of each edge the substitution ``theta = arctan s``
    turns the density into ``dtheta / (pi (q+t-1))``; the breakpoint at the
    foot of the perpendicular from ``z`` handles the near-singularity.
    Infinite ends are integrated in ``v = log|s|`` (smooth, exponentially
    decaying) and cut where the analytic tail bound meets the budget.
    """
    z = complex(z)
    weight = 1.0 / (math.pi * spec.denom)
    budget = quad_tol / max(len(diagram.edges), 1)
    total = 0.0
    for e in diagram.edges:
        m, r, u = e.midpoint, e.half_sep, e.direction
        dist_mid = abs(z - m)

        def logdist(s, m=m, r=r, u=u):
            return math.log(abs(z - (m + s * r * u)))

        s_f = e.param(z)
        lo, hi = e.s_a, e.s_b
        s1 = 2.0 * max(1.0, (1.0 + dist_mid) / r, abs(s_f))
        pieces = 0.0
        eps = budget / (8 * weight)
        if not math.isfinite(hi):
            S = _tail_cutoff(dist_mid, r, budget / (4 * weight))
            a = max(s1, lo) if math.isfinite(lo) else s1
            if S > a:
                pieces += _quad_piece(
                    lambda v: logdist(math.exp(v)) * math.exp(v) / (1 + math.exp(2 * v)),
                    math.log(a), math.log(S), eps, e.site_pair,
                )
            hi = a
        if not math.isfinite(lo):
            S = _tail_cutoff(dist_mid, r, budget / (4 * weight))
            b = min(-s1, hi)
            if S > -b:
                pieces += _quad_piece(
                    lambda v: logdist(-math.exp(v)) * math.exp(v) / (1 + math.exp(2 * v)),
                    math.log(-b), math.log(S), eps, e.site_pair,
                )
            lo = b
        if hi > lo:
            breaks = [math.atan(lo)]
            if lo < s_f < hi:
                breaks.append(math.atan(s_f))
            breaks.append(math.atan(hi))
            for a, b in zip(breaks[:-1], breaks[1:]):
                pieces += _quad_piece(lambda th: logdist(math.tan(th)), a, b, eps, e.site_pair)
        total += weight * pieces
    return total


# --------------------------------------------------------------------------
# grid diagnostics
# --------------------------------------------------------------------------


@dataclass
class L1Estimate:
    value: float          # midpoint-rule integral over retained cells
    skipped_area: float   # area of cells excluded near atoms / poles
    covered_area: float   # area of retained cells
    n_cells: int


def _disk_cells(center: complex, rho: float, h: float) -> np.ndarray:
    k = int(math.ceil(rho / h))
    offs = (np.arange(-k, k) + 0.5) * h
    X, Y = np.meshgrid(offs, offs, indexing="xy")
    pts = center + X.ravel() + 1j * Y.ravel()
    return pts[np.abs(pts - center) < rho]


def l1_discrepancy(
    measure: EmpiricalMeasure,
    spec: LimitPotentialSpec,
    diagram: VoronoiDiagram | None,
    disk: tuple[complex, float],
    grid_h: float,
    eps: float = 0.0,
) -> L1Estimate:
    """Midpoint-rule estimate of ``int_disk |shifted potential - Psi|``.

    Cells whose centres lie within ``max(eps, 2 h)`` of an atom or a pole
    are left out and their area is reported.  ``diagram`` is unused by the
    estimate itself and accepted for symmetry with the other diagnostics.
    """
    if grid_h <= 0 or eps < 0:
        raise ValueError("grid_h must be positive and eps nonnegative")
    center, rho = complex(disk[0]), float(disk[1])
    pts = _disk_cells(center, rho, grid_h)
    cut = max(eps, 2 * grid_h)
    alpha = measure.locations()
    singular = np.concatenate([alpha, np.asarray(spec.zeros, dtype=complex)])
    near = np.zeros(pts.shape, dtype=bool)
    for s in singular:
        if abs(s - center) < rho + cut:
            near |= np.abs(pts - s) < cut
    keep = pts[~near]
    diff = np.abs(shifted_empirical_values(keep, alpha, measure.n, measure.m_n) - psi_values(keep, spec))
    area = grid_h * grid_h
    return L1Estimate(
        float(diff.sum() * area), float(near.sum() * area), float(len(keep) * area), len(keep)
    )


def sup_error(measure: EmpiricalMeasure, spec: LimitPotentialSpec, square: tuple[complex, float], h: float) -> float:
    """``max |shifted potential - Psi|`` on a closed square (center, half-width)."""
    center, half = complex(square[0]), float(square[1])
    k = max(int(round(2 * half / h)), 1)
    offs = np.linspace(-half, half, k + 1)
    X, Y = np.meshgrid(offs, offs)
    pts = center + X.ravel() + 1j * Y.ravel()
    alpha = measure.locations()
    diff = shifted_empirical_values(pts, alpha, measure.n, measure.m_n) - psi_values(pts, spec)
    return float(np.max(np.abs(diff)))


def stencil_laplacian(f: Callable[[np.ndarray], np.ndarray], points, h: float, nodes: int = 4) -> np.ndarray:
    """``4 (mean of f on the circle of radius h - f(center)) / h^2``.

    With ``nodes=4`` this is the classical five-point stencil.  Larger node
    counts integrate harmonic functions on the circle to near machine
    precision, which makes the sign of the result meaningful for
    subharmonicity checks.
    """
    pts = np.asarray(points, dtype=complex)
    ring = h * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    mean = np.mean(f(pts[..., None] + ring), axis=-1)
    return 4.0 * (mean - f(pts)) / (h * h)


def _rect_grid(region: tuple[float, float, float, float], h: float) -> np.ndarray:
    x0, x1, y0, y1 = region
    nx = max(int(round((x1 - x0) / h)), 1)
    ny = max(int(round((y1 - y0) / h)), 1)
    X, Y = np.meshgrid(np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1))
    return X + 1j * Y


@dataclass
class HarmonicityReport:
    h: float
    max_abs: float
    values: np.ndarray = field(repr=False)


def harmonicity_check(
    spec: LimitPotentialSpec,
    region: tuple[float, float, float, float],
    h: float,
    diagram: VoronoiDiagram | None = None,
) -> HarmonicityReport:
    """Five-point Laplacian of Psi on a lattice (spacing ``h``) over a rectangle.

    The rectangle ``(x0, x1, y0, y1)`` must stay ``3h`` away from the
    skeleton and the poles; inside a cell Psi is harmonic so the result is
    ``O(h^2)``.
    """
    diagram = diagram or build_voronoi(spec.zeros)
    grid = _rect_grid(region, h)
    flat = grid.ravel()
    if np.min(distances_to_skeleton(flat, diagram)) < 3 * h:
        raise ValueError("region comes within 3h of the skeleton")
    if min(np.min(np.abs(flat - z)) for z in spec.zeros) < 3 * h:
        raise ValueError("region comes within 3h of a pole")
    vals = stencil_laplacian(lambda w: psi_values(w, spec), grid, h)
    return HarmonicityReport(h, float(np.max(np.abs(vals))), vals)


@dataclass
class SubharmonicityReport:
    h: float
    min_value: float      # most negative circular-stencil Laplacian
    max_value: float
    edge_fraction: float  # share of the positive stencil mass within 2h of the skeleton
    values: np.ndarray = field(repr=False)


def subharmonicity_check(
    spec: LimitPotentialSpec,
    region: tuple[float, float, float, float],
    h: float,
    nodes: int = 32,
    diagram: VoronoiDiagram | None = None,
) -> SubharmonicityReport:
    """Circular-stencil Laplacian of Psi on a rectangle that may cross edges."""
    diagram = diagram or build_voronoi(spec.zeros)
    grid = _rect_grid(region, h)
    vals = stencil_laplacian(lambda w: psi_values(w, spec), grid, h, nodes=nodes)
    near = distances_to_skeleton(grid.ravel(), diagram).reshape(grid.shape) <= 2 * h
    pos = np.clip(vals, 0, None)
    total = pos.sum()
    frac = float(pos[near].sum() / total) if total > 0 else 0.0
    return SubharmonicityReport(h, float(vals.min()), float(vals.max()), frac, vals)


# --------------------------------------------------------------------------
# growth of the zeros
# --------------------------------------------------------------------------


@dataclass
class GrowthBoundSeries:
    ns: list[int]
    values: list[float]
    limit: float        # C = (log|Q'(0)| - log(|c_q| |d_t| t)) / (q + t - 1)
    tail_min: float
    tail_max: float


def check_normalized(instance: ProblemInstance) -> None:
    if not instance.Q[0].is_zero():
        raise NormalizationViolated("Q(0) != 0: no pole at the origin")
    others = [z for z in instance.Q_zeros if abs(complex(z)) > 1e-12]
    if len(others) != instance.q - 1 or any(abs(complex(z)) <= 2 for z in others):
        raise NormalizationViolated("another pole lies in the closed disk |z| <= 2")


def growth_bound_series(
    seq: DerivativeSequence,
    roots: Mapping[int, RootSet | np.ndarray],
    rho: float = 1.0,
) -> GrowthBoundSeries:
    """``b_n = (sum_{|alpha| >= rho} log|alpha| - log n!) / m_n`` for each ``n`` in ``roots``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    inst = seq.instance
    check_normalized(inst)
    ns, vals = [], []
    for n in sorted(roots):
        r = roots[n]
        alpha = r.as_complex() if isinstance(r, RootSet) else np.asarray(r, dtype=complex)
        m = seq[n].m_n
        if m == 0:
            continue
        big = np.abs(alpha)[np.abs(alpha) >= rho]
        ns.append(n)
        vals.append(float((np.log(big).sum() - gammaln(n + 1)) / m))
    lead = abs(complex(inst.c_q)) * abs(complex(inst.d_t)) * inst.t
    C = (math.log(abs(complex(inst.Q[1]))) - math.log(lead)) / (inst.q + inst.t - 1)
    half = ns[len(ns) // 2:] if ns else []
    tail = [v for n, v in zip(ns, vals) if n in half]
    return GrowthBoundSeries(ns, vals, C, min(tail, default=math.nan), max(tail, default=math.nan))


# --------------------------------------------------------------------------
# fields on grids
# --------------------------------------------------------------------------


def potential_grid(
    kind: str,
    spec: LimitPotentialSpec,
    center: complex,
    rho: float,
    h: float,
    measure: EmpiricalMeasure | None = None,
) -> PotentialField:
    """Sample Psi or an empirical shifted potential on the square around a disk."""
    k = int(math.ceil(rho / h))
    offs = np.arange(-k, k + 1) * h
    X, Y = np.meshgrid(offs, offs)
    pts = complex(center) + (X + 1j * Y).ravel()
    if kind == "closed_form_psi":
        vals = psi_values(pts, spec)
    elif kind == "empirical_shifted":
        if measure is None:
            raise ValueError("empirical field needs a measure")
        vals = shifted_empirical_values(pts, measure.locations(), measure.n, measure.m_n)
    else:
        raise ValueError(f"unknown field kind {kind!r}")
    return PotentialField(pts, vals, kind, h)


def write_field_csv(fh, fld: PotentialField) -> None:
    fh.write("re,im,value,kind\n")
    for p, v in zip(fld.points, fld.values):
        fh.write(f"{p.real!r},{p.imag!r},{float(v)!r},{fld.kind}\n")
