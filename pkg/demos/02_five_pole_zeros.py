"""
Zeros of the 15th derivative and the Voronoi skeleton
=====================================================

Poles at 0, -2, 4+3i, 3-5i, -3-9i and ``T = z + 1``.  The 75 zeros of
``P_15`` are found at 512 bits, certified, and compared with the edges of
the Voronoi diagram of the poles.  The picture goes to ``five_poles.svg``.
"""

from pathlib import Path

import numpy as np

from shire.gauss_poly import Polynomial, ProblemInstance, generate_sequence
from shire.potential import LimitPotentialSpec, total_mass
from shire.rootfind import certify_roots, find_roots
from shire.voronoi import build_voronoi, distances_to_skeleton, voronoi_svg

POLES = ["0", "-2", "4+3i", "3-5i", "-3-9i"]
Q = Polynomial.from_roots(POLES)
inst = ProblemInstance.create(["1"], Q, ["1", "1"], precision_bits=512)
P15 = generate_sequence(inst, 15)[15].P_n

roots = find_roots(P15, precision_bits=512)
cert = certify_roots(P15, roots)
print(f"{len(roots)} zeros, worst relative residual {max(cert.relative_residuals):.1e}, "
      f"closest pair {cert.min_separation:.3f} apart")

###############################################################################
# The limit measure puts mass (q-1)/(q+t-1) = 4/5 on the skeleton; the rest
# escapes to infinity.  How many zeros are near an edge depends on what
# "near" means, so sweep the distance.

spec = LimitPotentialSpec.from_instance(inst)
diagram = build_voronoi(spec.zeros)
dist = distances_to_skeleton(roots.as_complex(), diagram)
print(f"skeleton mass {total_mass(diagram, spec):.12f}")
for eps in (0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0):
    print(f"  within {eps:3.1f} of an edge: {np.count_nonzero(dist < eps):2d} / 75")

###############################################################################
# The zeros more than 1 away from every edge form loops around the outer
# poles, several units out; these loops drift outward as n grows.

far = roots.as_complex()[dist > 1.0]
poles = np.array([complex(s.replace("i", "j")) for s in POLES])
nearest = np.argmin(np.abs(far[:, None] - poles[None, :]), axis=1)
for k, label in enumerate(POLES):
    sel = far[nearest == k]
    if len(sel):
        r = np.abs(sel - poles[k])
        print(f"  {len(sel):2d} far zeros nearest to {label}, at distance {r.min():.1f} to {r.max():.1f}")

out = Path(__file__).with_name("five_poles.svg")
out.write_text(voronoi_svg(diagram, roots.as_complex(), title="zeros of P_15"))
print("wrote", out)
