"""
The limit potential and the skeleton measure
============================================

``Psi`` has a closed form.  The log potential ``L`` of the skeleton measure
is an integral along the Voronoi edges.  They differ by the constant
``D = log(|d_t| t)/(q+t-1)``, and this checks it numerically.
"""

import math

import numpy as np

from shire.potential import (
    LimitPotentialSpec,
    edge_mass,
    harmonicity_check,
    muS_log_potential,
    psi,
    subharmonicity_check,
    total_mass,
)
from shire.voronoi import build_voronoi, distances_to_skeleton

sites = [0, -2, 4 + 3j, 3 - 5j, -3 - 9j]
spec = LimitPotentialSpec.from_sites(sites, t=2, d_t=3)
diagram = build_voronoi(sites)

for e in diagram.edges:
    print(f"edge {e.site_pair} ({e.kind:7s}) mass {edge_mass(e, spec):.6f}")
print(f"total {total_mass(diagram, spec):.15f}   (q-1)/(q+t-1) = {spec.mass:.15f}")

###############################################################################
# Psi - (L - D) at random points off the skeleton

rng = np.random.default_rng(3)
pts = rng.uniform(-8, 8, 200) + 1j * rng.uniform(-10, 6, 200)
pts = pts[distances_to_skeleton(pts, diagram) > 0.1][:25]
err = max(abs(psi(z, spec) - muS_log_potential(z, diagram, spec) + spec.D) for z in pts)
print(f"max |Psi - (L - D)| over {len(pts)} points: {err:.1e}")

###############################################################################
# far away Psi ~ mass * log|z| - D (note the sign of D)

for R in (1e2, 1e4, 1e6):
    z = R * complex(math.cos(0.7), math.sin(0.7))
    print(f"|z|={R:.0e}: Psi - mass log|z| = {psi(z, spec) - spec.mass * math.log(R):+.6f}   -D = {-spec.D:+.6f}")

###############################################################################
# Harmonic inside the cells (five-point stencil error falls like h^2),
# subharmonic across the edges.

for h in (0.1, 0.05, 0.025):
    print(f"h={h:<6} max |Lap Psi| inside a cell: {harmonicity_check(spec, (0.5, 1.5, 0.5, 1.5), h).max_abs:.2e}")
rep = subharmonicity_check(spec, (-1.5, -0.5, -0.5, 0.5), 0.05)
print(f"across the edge x = -1: min {rep.min_value:.1e}, max {rep.max_value:.2f}, "
      f"{100 * rep.edge_fraction:.1f}% of the positive part within 2h of the edge")
