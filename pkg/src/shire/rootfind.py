"""All-roots solver for exact polynomials and the zero-counting measure.

Roots are computed with the Aberth-Ehrlich simultaneous iteration.  A cheap
double-precision pass (vectorised with numpy) supplies starting values when
the coefficients fit in floating point; the iteration is then continued in
mpmath at the requested precision plus guard bits.  A root is frozen once
its correction is below the working epsilon or its residual is at the
rounding-noise level of Horner evaluation (a backward-error stop), since
near that floor the relative corrections stagnate.  Starting values come from the Newton polygon
of the coefficient moduli (one circle per polygon edge), which keeps the
iteration deterministic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import mpmath
import numpy as np

from .gauss_poly import Polynomial

__all__ = [
    "NonConvergence",
    "RootSet",
    "CertificationReport",
    "EmpiricalMeasure",
    "default_precision",
    "find_roots",
    "certify_roots",
    "empirical_measure",
    "write_zeros_csv",
]

GUARD_BITS = 32


class NonConvergence(RuntimeError):
    """Sweep limit reached with residuals still above the bound."""


def default_precision(n: int) -> int:
    """Working precision able to absorb the ``n!`` growth of ``P_n``."""
    return max(256, math.ceil(4 * n * math.log2(n + 2)))


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    source_degree: int
    residual_bound: float
    precision_bits: int
    sweeps: int = 0

    def __len__(self):
        return len(self.roots)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(r) for r in self.roots], dtype=complex)


@dataclass
class CertificationReport:
    residuals: list            # |poly(alpha)| per root
    relative_residuals: list   # residual / (max|a_k| * max(1,|alpha|)^deg)
    nearest: list              # (index of nearest other root, distance)
    cluster_threshold: float
    clusters: list = field(default_factory=list)        # index pairs closer than threshold
    flagged_residuals: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flagged_residuals

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def min_separation(self) -> float:
        return min((d for _, d in self.nearest), default=math.inf)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform probability measure on the zeros of ``P_n``."""

    atoms: tuple  # (location, weight) pairs
    n: int
    m_n: int

    def locations(self) -> np.ndarray:
        return np.array([complex(a) for a, _ in self.atoms], dtype=complex)

    @property
    def total_weight(self) -> float:
        return math.fsum(w for _, w in self.atoms)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _newton_polygon_start(abs_log: list[float], seed_offset: int) -> list[complex]:
    """Starting points on circles given by the upper Newton polygon.

    ``abs_log[k]`` is ``log|a_k|`` (``-inf`` for vanishing coefficients).
    """
    d = len(abs_log) - 1
    pts = [(k, v) for k, v in enumerate(abs_log) if v != -math.inf]
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop while the middle point is on or below the chord
            if (x2 - x1) * (p[1] - y1) - (p[0] - x1) * (y2 - y1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    starts: list[complex] = []
    sigma = 0.7 + 0.1 * seed_offset
    for idx in range(len(hull) - 1):
        (k0, v0), (k1, v1) = hull[idx], hull[idx + 1]
        count = k1 - k0
        radius = math.exp((v0 - v1) / count)
        for j in range(count):
            ang = 2 * math.pi * j / count + 2 * math.pi * idx / d + sigma
            starts.append(radius * complex(math.cos(ang), math.sin(ang)))
    return starts


def _float_aberth(coeffs: np.ndarray, z: np.ndarray, sweeps: int = 200) -> np.ndarray | None:
    """Double-precision Aberth pass; returns ``None`` on overflow/nan."""
    d = len(z)
    desc = coeffs[::-1]
    with np.errstate(all="ignore"):
        for _ in range(sweeps):
            p = np.full(d, desc[0], dtype=complex)
            dp = np.zeros(d, dtype=complex)
            for c in desc[1:]:
                dp = dp * z + p
                p = p * z + c
            w = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            delta = w / (1.0 - w * s)
            delta[p == 0] = 0.0
            if not np.all(np.isfinite(delta)):
                return None
            z = z - delta
            if np.all(np.abs(delta) <= 1e-14 * np.maximum(np.abs(z), 1e-300)):
                break
    if not np.all(np.isfinite(z)):
        return None
    return z


def _horner2(desc, x):
    p = desc[0]
    dp = mpmath.mpc(0)
    for c in desc[1:]:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _eval_mp(desc, x):
    p = desc[0]
    for c in desc[1:]:
        p = p * x + c
    return p


def _scale(coeffs_abs: list, x) -> object:
    return max(coeffs_abs) * max(mpmath.mpf(1), abs(x)) ** (len(coeffs_abs) - 1)


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


def find_roots(
    poly: Polynomial,
    precision_bits: int = 256,
    max_sweeps: int = 500,
    seed_offset: int = 0,
    residual_bound: float | None = None,
) -> RootSet:
    """Compute all ``deg(poly)`` roots with multiplicity.

    Parameters
    ----------
    poly : Polynomial
        Exact polynomial of degree at least one.
    precision_bits : int
        Precision of the returned roots (at least 64).
    max_sweeps : int
        Sweep limit for the multiprecision Aberth stage.
    seed_offset : int
        Rotates the initial circles; different offsets give different (but
        reproducible) iteration paths.
    residual_bound : float, optional
        Bound on ``|poly(alpha)| / (max|a_k| * max(1,|alpha|)^deg)``.
        Defaults to ``2**(-precision_bits/2)``.

    Raises
    ------
    NonConvergence
        The sweep limit was hit and some residual exceeds the bound.
    """
    d = poly.degree
    if d < 1:
        raise ValueError("find_roots needs a nonconstant polynomial")
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    if residual_bound is None:
        residual_bound = 2.0 ** (-precision_bits / 2)

    # exact zeros at the origin are split off
    k0 = 0
    while poly.coeffs[k0].is_zero():
        k0 += 1
    reduced = Polynomial(poly.coeffs[k0:])
    dr = reduced.degree

    work = precision_bits + GUARD_BITS
    sweeps_done = 0
    with mpmath.workprec(work):
        coeffs = reduced.to_mpc_coeffs()
        roots_mp: list = []
        if dr == 1:
            roots_mp = [-coeffs[0] / coeffs[1]]
        elif dr > 1:
            roots_mp, sweeps_done = _aberth_mp(coeffs, max_sweeps, seed_offset, work)
        roots_mp = roots_mp + [mpmath.mpc(0)] * k0

        full = poly.to_mpc_coeffs()
        desc = full[::-1]
        abs_c = [abs(c) for c in full]
        bad = []
        for r in roots_mp:
            rel = abs(_eval_mp(desc, r)) / _scale(abs_c, r)
            if rel > residual_bound:
                bad.append(float(rel))
        if bad:
            raise NonConvergence(
                f"{len(bad)} of {d} roots exceed residual bound {residual_bound:.3g} "
                f"(worst {max(bad):.3g}) after {sweeps_done} sweeps at {precision_bits} bits"
            )
    with mpmath.workprec(precision_bits):
        out = sorted((+r for r in roots_mp), key=lambda r: (r.real, r.imag))
    return RootSet(tuple(out), d, residual_bound, precision_bits, sweeps_done)


def _aberth_mp(coeffs: list, max_sweeps: int, seed_offset: int, work: int):
    d = len(coeffs) - 1
    abs_log = [float(mpmath.log(abs(c))) if c != 0 else -math.inf for c in coeffs]
    start = _newton_polygon_start(abs_log, seed_offset)

    # float warm start, coefficients normalised by the largest modulus
    top = max(abs_log)
    if all(v == -math.inf or v - top > -700 for v in abs_log):
        fc = np.array(
            [complex(c * mpmath.exp(-top)) if c != 0 else 0j for c in coeffs], dtype=complex
        )
        warm = _float_aberth(fc, np.array(start, dtype=complex))
        if warm is not None:
            start = list(warm)

    z = [mpmath.mpc(s) for s in start]
    desc = coeffs[::-1]
    abs_desc = [abs(c) for c in desc]
    tol = mpmath.mpf(2) ** (-(work - 8))
    # |p(z)| below the Horner rounding bound means z is as good as it gets
    noise = mpmath.mpf(2) ** (-(work - 4)) * 4 * (d + 1)
    tiny = mpmath.mpf(2) ** (-work)
    done = [False] * d
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        new = list(z)
        for k in range(d):
            if done[k]:
                continue
            zk = z[k]
            p, dp = _horner2(desc, zk)
            if p == 0 or abs(p) <= noise * _eval_mp(abs_desc, abs(zk)):
                done[k] = True
                continue
            w = p / dp
            s = mpmath.mpc(0)
            for j in range(d):
                if j != k:
                    s += 1 / (zk - z[j])
            delta = w / (1 - w * s)
            new[k] = zk - delta
            if abs(delta) <= tol * max(abs(zk), tiny):
                done[k] = True
        z = new
        if all(done):
            break
    return z, sweeps


def certify_roots(poly: Polynomial, roots: RootSet) -> CertificationReport:
    """Residuals and separations for a root set.

    Residuals are evaluated with 64 bits beyond the root precision so they
    reflect the stored roots rather than evaluation noise.
    """
    prec = roots.precision_bits
    threshold = 2.0 ** (-prec / 4)
    residuals, relative, nearest, flagged = [], [], [], []
    with mpmath.workprec(prec + 64):
        full = poly.to_mpc_coeffs()
        desc = full[::-1]
        abs_c = [abs(c) for c in full]
        for idx, r in enumerate(roots.roots):
            res = abs(_eval_mp(desc, mpmath.mpc(r)))
            rel = res / _scale(abs_c, r)
            residuals.append(float(res))
            relative.append(float(rel))
            if rel > roots.residual_bound:
                flagged.append(idx)
        pts = [mpmath.mpc(r) for r in roots.roots]
        clusters = []
        for i, a in enumerate(pts):
            best_j, best = -1, math.inf
            for j, b in enumerate(pts):
                if i == j:
                    continue
                dist = float(abs(a - b))
                if dist < best:
                    best_j, best = j, dist
                if j > i and dist < threshold:
                    clusters.append((i, j))
            nearest.append((best_j, best))
    return CertificationReport(residuals, relative, nearest, threshold, clusters, flagged)


def empirical_measure(roots: RootSet, n: int) -> EmpiricalMeasure:
    """Mass ``1/m_n`` at each zero, counted with multiplicity."""
    m = roots.source_degree
    if m < 1 or len(roots.roots) != m:
        raise ValueError("zero-counting measure needs a complete root set of degree >= 1")
    w = 1.0 / m
    return EmpiricalMeasure(tuple((r, w) for r in roots.roots), n, m)


def write_zeros_csv(fh: TextIO, records: Iterable[tuple[int, RootSet, list]]) -> None:
    """Write ``n,index,re,im,residual`` rows.

    ``records`` yields ``(n, roots, residuals)``; digits follow the root
    precision.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "index", "re", "im", "residual"])
    for n, roots, residuals in records:
        digits = max(15, int(roots.precision_bits * math.log10(2)))
        for idx, (r, res) in enumerate(zip(roots.roots, residuals)):
            writer.writerow(
                [n, idx, mpmath.nstr(r.real, digits), mpmath.nstr(r.imag, digits), f"{res:.6e}"]
            )
