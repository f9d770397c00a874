"""
Numerators of iterated derivatives
==================================

Every derivative of ``f = (P/Q) exp(T)`` has the shape
``P_n / Q^(n+1) * exp(T)``, and the numerators obey a one-line recursion.
We run it exactly over the Gaussian rationals for ``f = e^z / (z(z-1))``.
"""

from shire.gauss_poly import (
    ProblemInstance,
    closed_form_leading_coeff,
    closed_form_value_at_zero,
    generate_sequence,
)

# coefficients are ascending strings; "a/b+c/di" is the general form
inst = ProblemInstance.create(P=["1"], Q=["0", "-1", "1"], T=["0", "1"])
seq = generate_sequence(inst, 8)

for e in seq.entries[:4]:
    print(f"P_{e.n} =", " + ".join(f"({c})z^{k}" for k, c in enumerate(e.P_n.coeffs)))

###############################################################################
# Degrees grow by q + t - 1 = 2 per step, the leading coefficient by the
# leading coefficient of Q T', and since Q(0) = 0 the constant term is
# n! (-Q'(0))^n P(0).

for e in seq.entries:
    print(
        f"n={e.n}  deg={e.m_n:2d} (law {inst.degree(e.n):2d})"
        f"  A_n={e.A_n}  (closed form {closed_form_leading_coeff(e.n, inst)})"
        f"  P_n(0)={e.P_n[0]}  (closed form {closed_form_value_at_zero(e.n, inst)})"
    )

###############################################################################
# Coefficients grow roughly like n!, which is why the zeros are later
# computed in multiprecision.

print("bits in the largest coefficient of P_8:", seq[8].P_n.max_coeff_bits())
