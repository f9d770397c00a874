"""Voronoi diagram of a small set of planar sites.

Each cell is obtained by clipping a large square against the ``q - 1``
bisector half-planes of its site (``O(q^2)`` per cell).  The square is
chosen to contain every Voronoi vertex with a wide margin, so an edge that
reaches it is unbounded in truth and is stored as a ray or a full line.

Edges are parameterised along their bisector as::

    zeta(s) = m + s * (|z_j - z_i| / 2) * u

where ``m`` is the midpoint of the two sites and ``u`` is the unit
direction ``i (z_j - z_i) / |z_j - z_i|``.  The parameter interval
``[s_a, s_b]`` may have infinite ends.

Coordinates are plain ``complex`` doubles; the sites come from roots
computed at high precision, but the geometry only needs double precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = [
    "DuplicateSites",
    "Edge",
    "VoronoiDiagram",
    "Location",
    "build_voronoi",
    "phi",
    "locate",
    "distance_to_skeleton",
    "distances_to_skeleton",
    "voronoi_svg",
]

DEFAULT_TOL = 1e-9


class DuplicateSites(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    """Piece of the bisector between ``sites[i]`` and ``sites[j]`` (``i < j``)."""

    site_pair: tuple[int, int]
    midpoint: complex
    direction: complex  # unit vector along the bisector
    half_sep: float     # |z_i - z_j| / 2
    s_a: float
    s_b: float

    @property
    def kind(self) -> str:
        fin = math.isfinite(self.s_a) + math.isfinite(self.s_b)
        return {2: "segment", 1: "ray", 0: "line"}[fin]

    def point(self, s: float) -> complex:
        return self.midpoint + s * self.half_sep * self.direction

    def param(self, z: complex) -> float:
        """Bisector parameter of the orthogonal projection of ``z``."""
        w = (z - self.midpoint) * self.direction.conjugate()
        return w.real / self.half_sep

    @property
    def endpoints(self) -> tuple[complex | None, complex | None]:
        a = self.point(self.s_a) if math.isfinite(self.s_a) else None
        b = self.point(self.s_b) if math.isfinite(self.s_b) else None
        return a, b

    @property
    def ray(self) -> tuple[complex, complex]:
        """``(origin, unit direction)`` for rays."""
        if self.kind != "ray":
            raise ValueError("edge is not a ray")
        if math.isfinite(self.s_a):
            return self.point(self.s_a), self.direction
        return self.point(self.s_b), -self.direction

    def distance(self, z: complex) -> float:
        s = min(max(self.param(z), self.s_a), self.s_b)
        return abs(z - self.point(s))

    def clipped(self, radius: float, center: complex = 0j) -> tuple[float, float]:
        """Parameter interval cut down to the disk ``|z - center| <= radius``."""
        # |m - c + s r u|^2 = radius^2 is a quadratic in s
        w = (self.midpoint - center) * self.direction.conjugate()
        r = self.half_sep
        b = w.real / r
        c = (abs(w) ** 2 - radius * radius) / (r * r)
        disc = b * b - c
        if disc <= 0:
            return (0.0, 0.0)
        root = math.sqrt(disc)
        lo, hi = max(self.s_a, -b - root), min(self.s_b, -b + root)
        if lo >= hi:
            return (0.0, 0.0)
        return lo, hi


@dataclass(frozen=True)
class VoronoiDiagram:
    sites: tuple[complex, ...]
    edges: tuple[Edge, ...]
    vertices: tuple[complex, ...]
    bound_radius: float  # disk around the site centroid holding all bounded features
    clip_radius: float   # rendering / quadrature truncation radius for rays
    tol: float           # absolute tolerance used in construction

    @property
    def center(self) -> complex:
        return complex(np.mean(self.sites))

    def edges_of(self, i: int) -> list[Edge]:
        return [e for e in self.edges if i in e.site_pair]


@dataclass(frozen=True)
class Location:
    kind: str              # "cell", "edge" or "vertex"
    sites: tuple[int, ...]  # one index for a cell, two for an edge, >= 3 for a vertex


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------


def _as_complex_sites(sites: Iterable) -> tuple[complex, ...]:
    return tuple(complex(s) for s in sites)


def _circumcenter(a: complex, b: complex, c: complex) -> complex | None:
    d = 2 * ((b - a).conjugate() * (c - a)).imag
    if d == 0:
        return None
    ab, ac = abs(b - a) ** 2, abs(c - a) ** 2
    # solve for x with |x|^2 - 2 Re(x conj(p)) = -|p|^2 relative to a
    ux = (ab * (c - a).imag - ac * (b - a).imag) / d
    uy = (ac * (b - a).real - ab * (c - a).real) / d
    return a + complex(ux, uy)


def _clip(poly: list[tuple[complex, int | None]], normal: complex, offset: float,
          label: int, tol: float) -> list[tuple[complex, int | None]]:
    """Keep ``Re(z conj(normal)) <= offset``; ``poly`` holds (vertex, label of edge leaving it)."""
    def f(z):
        return (z * normal.conjugate()).real - offset

    out: list[tuple[complex, int | None]] = []
    n = len(poly)
    for k in range(n):
        a, lab = poly[k]
        b = poly[(k + 1) % n][0]
        fa, fb = f(a), f(b)
        a_in, b_in = fa <= tol, fb <= tol
        if a_in and b_in:
            out.append((a, lab))
        elif a_in and not b_in:
            out.append((a, lab))
            if fa < -tol:
                x = a + (b - a) * (fa / (fa - fb))
                out.append((x, label))
            else:
                out[-1] = (a, label)
        elif b_in and not a_in:
            if fb < -tol:
                x = a + (b - a) * (fa / (fa - fb))
                out.append((x, lab))
    # drop consecutive duplicates
    cleaned: list[tuple[complex, int | None]] = []
    for v, lab in out:
        if cleaned and abs(v - cleaned[-1][0]) <= tol:
            cleaned[-1] = (cleaned[-1][0], lab)
            continue
        cleaned.append((v, lab))
    if len(cleaned) > 1 and abs(cleaned[0][0] - cleaned[-1][0]) <= tol:
        cleaned.pop()
    return cleaned


def build_voronoi(sites: Sequence, tol: float = DEFAULT_TOL) -> VoronoiDiagram:
    """Voronoi diagram of at least two distinct sites.

    ``tol`` is relative to the largest site modulus.
    """
    z = _as_complex_sites(sites)
    q = len(z)
    if q < 2:
        raise ValueError("need at least two sites")
    scale = max(max(abs(s) for s in z), 1e-300)
    atol = tol * max(scale, 1.0)
    for i, j in itertools.combinations(range(q), 2):
        if abs(z[i] - z[j]) <= atol:
            raise DuplicateSites(f"sites {i} and {j} coincide within {atol:g}")

    center = complex(np.mean(z))
    spread = max(abs(s - center) for s in z)
    diam = max(abs(a - b) for a, b in itertools.combinations(z, 2))
    far = spread
    for a, b, c in itertools.combinations(z, 3):
        cc = _circumcenter(a, b, c)
        if cc is None:
            continue
        r = abs(cc - a)
        if all(abs(cc - s) >= r - atol for s in z):
            far = max(far, abs(cc - center))
    bound = far + 1.0
    box = 4.0 * bound + 10.0 * diam

    corners = [center + box * w for w in (-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j)]
    raw: dict[tuple[int, int], list[tuple[complex, complex]]] = {}
    vertex_pts: list[complex] = []
    for i in range(q):
        poly: list[tuple[complex, int | None]] = [(c, None) for c in corners]
        for j in range(q):
            if j == i:
                continue
            d = z[j] - z[i]
            offset = (abs(z[j]) ** 2 - abs(z[i]) ** 2) / 2
            poly = _clip(poly, d, offset, j, atol * abs(d))
        n = len(poly)
        for k in range(n):
            a, lab = poly[k]
            b = poly[(k + 1) % n][0]
            if lab is not None and abs(b - a) > 1e3 * atol:
                key = (min(i, lab), max(i, lab))
                raw.setdefault(key, []).append((a, b))
            on_box = max(abs((a - center).real), abs((a - center).imag)) >= box * (1 - 1e-12)
            if not on_box:
                vertex_pts.append(a)

    edges: list[Edge] = []
    for (i, j), pieces in sorted(raw.items()):
        d = z[j] - z[i]
        mid = (z[i] + z[j]) / 2
        u = 1j * d / abs(d)
        half = abs(d) / 2
        e0 = Edge((i, j), mid, u, half, -math.inf, math.inf)
        # both cells report the same piece; use the first
        a, b = pieces[0]
        sa, sb = sorted((e0.param(a), e0.param(b)))
        pa, pb = e0.point(sa), e0.point(sb)
        if max(abs((pa - center).real), abs((pa - center).imag)) >= box * (1 - 1e-9):
            sa = -math.inf
        if max(abs((pb - center).real), abs((pb - center).imag)) >= box * (1 - 1e-9):
            sb = math.inf
        edges.append(Edge((i, j), mid, u, half, sa, sb))

    merged: list[complex] = []
    for v in vertex_pts:
        if all(abs(v - w) > 1e3 * atol for w in merged):
            merged.append(v)
    merged.sort(key=lambda v: (v.real, v.imag))

    clip = 4.0 * diam + 10.0
    return VoronoiDiagram(z, tuple(edges), tuple(merged), bound, clip, atol)


# --------------------------------------------------------------------------
# queries
# --------------------------------------------------------------------------


def phi(z: complex, sites: Sequence) -> float:
    """Distance from ``z`` to the nearest site."""
    return min(abs(complex(z) - complex(s)) for s in sites)


def locate(z: complex, diagram: VoronoiDiagram, tol: float = DEFAULT_TOL) -> Location:
    """Classify ``z`` as interior to a cell, on an edge, or at a vertex.

    Distances within ``tol`` (relative to the site scale) of the minimum
    count as ties.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = diagram.tol / DEFAULT_TOL
    atol = tol * scale
    z = complex(z)
    dist = [abs(z - s) for s in diagram.sites]
    best = min(dist)
    tied = tuple(i for i, d in enumerate(dist) if d - best <= atol)
    if len(tied) == 1:
        return Location("cell", tied)
    if len(tied) == 2:
        return Location("edge", tied)
    return Location("vertex", tied)


def distance_to_skeleton(z: complex, diagram: VoronoiDiagram) -> float:
    """Euclidean distance from ``z`` to the union of all edges."""
    z = complex(z)
    return min(e.distance(z) for e in diagram.edges)


def distances_to_skeleton(points: np.ndarray, diagram: VoronoiDiagram) -> np.ndarray:
    """Vectorised :func:`distance_to_skeleton` for an array of points."""
    pts = np.asarray(points, dtype=complex)
    best = np.full(pts.shape, np.inf)
    for e in diagram.edges:
        s = ((pts - e.midpoint) * np.conj(e.direction)).real / e.half_sep
        s = np.clip(s, e.s_a, e.s_b)
        best = np.minimum(best, np.abs(pts - (e.midpoint + s * e.half_sep * e.direction)))
    return best


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------


def _clip_to_box(e: Edge, x0, x1, y0, y1) -> tuple[complex, complex] | None:
    """Liang-Barsky clip of the edge against an axis-aligned box."""
    lo, hi = e.s_a, e.s_b
    dx = (e.half_sep * e.direction).real
    dy = (e.half_sep * e.direction).imag
    mx, my = e.midpoint.real, e.midpoint.imag
    for p, qv in ((-dx, mx - x0), (dx, x1 - mx), (-dy, my - y0), (dy, y1 - my)):
        if p == 0:
            if qv < 0:
                return None
            continue
        t = qv / p
        if p < 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo >= hi:
        return None
    return e.point(lo), e.point(hi)


def voronoi_svg(
    diagram: VoronoiDiagram,
    zeros: Sequence[complex] | None = None,
    size: int = 600,
    title: str | None = None,
) -> str:
    """Render sites (``class="site"``), edges and optional zeros as SVG.

    The viewport is the bounding box of the sites (and zeros, if given)
    enlarged by 25% on each side; edges are clipped to it.
    """
    pts = list(diagram.sites) + [complex(w) for w in (zeros if zeros is not None else ())]
    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w = max(x1 - x0, y1 - y0, 1e-6)
    padx = 0.25 * max(x1 - x0, 0.2 * w)
    pady = 0.25 * max(y1 - y0, 0.2 * w)
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady
    k = size / max(x1 - x0, y1 - y0)
    width, height = (x1 - x0) * k, (y1 - y0) * k

    def tx(p: complex) -> tuple[float, float]:
        return (p.real - x0) * k, (y1 - p.imag) * k

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        f'<rect width="{width:.3f}" height="{height:.3f}" fill="white"/>',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    for e in diagram.edges:
        seg = _clip_to_box(e, x0, x1, y0, y1)
        if seg is None:
            continue
        (ax, ay), (bx, by) = tx(seg[0]), tx(seg[1])
        out.append(
            f'<line class="edge" x1="{ax:.3f}" y1="{ay:.3f}" x2="{bx:.3f}" y2="{by:.3f}" '
            f'stroke="black" stroke-width="1"/>'
        )
    for s in diagram.sites:
        cx, cy = tx(s)
        out.append(f'<circle class="site" cx="{cx:.3f}" cy="{cy:.3f}" r="4" fill="red"/>')
    for w_ in zeros if zeros is not None else ():
        cx, cy = tx(complex(w_))
        out.append(f'<circle class="zero" cx="{cx:.3f}" cy="{cy:.3f}" r="1.8" fill="blue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
