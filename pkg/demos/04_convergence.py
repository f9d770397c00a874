"""
How fast do the shifted potentials settle?
==========================================

Rates are not known, so we just look: for ``e^z/(z(z-1))`` the sup error on
a square inside the cell of 0 and the L1 error on a disk both fall as n
grows.  The growth series ``b_n`` is shown for an instance normalized so
that one pole is at 0 and the others lie outside ``|z| <= 2``.
"""

from shire.cli import ExperimentConfig, convergence_study
from shire.gauss_poly import Polynomial, ProblemInstance, generate_sequence
from shire.potential import growth_bound_series
from shire.rootfind import default_precision, find_roots

cfg = ExperimentConfig(
    name="two_poles",
    P=["1"],
    Q=["0", "-1", "1"],
    T=["0", "1"],
    n_list=[5, 10, 20, 40],
    disk_center="1/2",
    disk_rho=3.0,
    grid_h=0.05,
    eps_list=[0.2, 0.5],
    square=("-1/2", 0.25),
)
table = convergence_study(cfg)
print("   n   sup error     I_1   near-skeleton share (eps=0.5)")
for row in table["rows"]:
    print(f"{row['n']:4d}   {row['sup_error']:9.4f}  {row['l1']:7.4f}   {row['skeleton_fraction']['0.5']:.3f}")
print("sup decreasing:", table["sup_error_decreasing"], "  I_1 decreasing:", table["l1_decreasing"])

###############################################################################
# b_n for Q = z(z-3)(z+1-3i), T = z^2 + z, P = 1 + z

inst = ProblemInstance.create(["1", "1"], Polynomial.from_roots(["0", "3", "-1+3i"]), ["0", "1", "1"])
seq = generate_sequence(inst, 25)
roots = {n: find_roots(seq[n].P_n, precision_bits=default_precision(n)) for n in (5, 10, 15, 20, 25)}
g = growth_bound_series(seq, roots)
for n, b in zip(g.ns, g.values):
    print(f"b_{n:<2d} = {b:.5f}   (b_n - C = {b - g.limit:+.5f})")
print(f"C = {g.limit:.5f}")
