import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shire.gauss_poly import (
    ConstantExponentError,
    GaussianRational,
    HypothesisViolation,
    Polynomial,
    ProblemInstance,
    ResourceLimitExceeded,
    closed_form_leading_coeff,
    closed_form_value_at_zero,
    format_coefficient,
    generate_sequence,
    parse_coefficient,
    parse_polynomial,
    poly_gcd,
    recursion_step,
    scale_translate_sequence,
    transform_instance,
)

G = GaussianRational

small_frac = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gauss = st.builds(G, small_frac, small_frac)
polys = st.lists(gauss, min_size=0, max_size=6).map(Polynomial)


# --------------------------------------------------------------------------
# an independent oracle: exact Taylor coefficients of f around a regular point
# --------------------------------------------------------------------------


def _series_mul(a, b, N):
    out = [G(0)] * N
    for i, x in enumerate(a[:N]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: N - i]):
            out[i + j] = out[i + j] + x * y
    return out


def _series_inv(a, N):
    inv = [G(0)] * N
    inv[0] = G(1) / a[0]
    for k in range(1, N):
        acc = G(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * inv[k - j]
        inv[k] = -acc * inv[0]
    return inv


def _series_exp0(s, N):
    """exp(S) for a series with S(0) = 0, from k e_k = sum_j j s_j e_{k-j}."""
    e = [G(1)] + [G(0)] * (N - 1)
    for k in range(1, N):
        acc = G(0)
        for j in range(1, min(k, len(s) - 1) + 1):
            acc = acc + G(j) * s[j] * e[k - j]
        e[k] = acc / G(k)
    return e


def taylor_oracle(P, Q, T, z0, n_max):
    """``P_n(z0)`` for n <= n_max via n! [w^n] of f(z0 + w) exp(-T(z0)) Q(z0)^{n+1}."""
    N = n_max + 1
    shift = lambda poly: list(poly.compose_affine(1, z0).coeffs) + [G(0)] * N  # noqa: E731
    p, q, t = shift(P), shift(Q), shift(T)
    t[0] = G(0)
    g = _series_mul(_series_mul(p, _series_inv(q, N), N), _series_exp0(t, N), N)
    q0 = Q(z0)
    return [g[n] * G(math.factorial(n)) * q0 ** (n + 1) for n in range(N)]


# --------------------------------------------------------------------------
# coefficients and parsing
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, re, im",
    [
        ("3", 3, 0),
        ("-1/2", Fraction(-1, 2), 0),
        ("2i", 0, 2),
        ("-i", 0, -1),
        ("1/2+3/4i", Fraction(1, 2), Fraction(3, 4)),
        ("-3-9i", -3, -9),
        ("0-3i", 0, -3),
    ],
)
def test_parse_coefficient(text, re, im):
    assert parse_coefficient(text) == G(re, im)


@pytest.mark.parametrize("bad", ["", "1.5", "i2", "1/0", "abc", "1+2j"])
def test_parse_coefficient_rejects(bad):
    with pytest.raises(ValueError):
        parse_coefficient(bad)


@given(gauss)
def test_format_parse_roundtrip(c):
    assert parse_coefficient(format_coefficient(c)) == c


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if not b.is_zero():
        assert (a / b) * b == a


def test_zero_polynomial_degree():
    assert Polynomial([]).degree == -1
    assert Polynomial(["0", "0"]).is_zero()
    assert Polynomial(["1", "0", "0"]).degree == 0


@given(polys, polys, polys)
def test_polynomial_ring(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_divmod_identity(a, b):
    quo, rem = a.divmod(b)
    assert quo * b + rem == a
    assert rem.degree < b.degree


@given(polys, gauss)
def test_evaluation_is_ring_homomorphism(a, z):
    b = a * a + Polynomial([1, 2])
    assert b(z) == a(z) * a(z) + G(1) + G(2) * z


def test_gcd_finds_common_factor():
    a = Polynomial.from_roots(["1", "2i", "-3"])
    b = Polynomial.from_roots(["2i", "5"])
    assert poly_gcd(a, b) == Polynomial.from_roots(["2i"])


def test_compose_affine():
    p = parse_polynomial(["1", "0", "1"])  # 1 + z^2
    # 1 + (2z + i)^2 = 4z^2 + 4iz
    assert p.compose_affine(2, "i") == Polynomial(["0", "4i", "4"])


# --------------------------------------------------------------------------
# the derivative recursion
# --------------------------------------------------------------------------


def test_two_poles_exact(two_poles, two_poles_golden):
    seq = generate_sequence(two_poles, 3)
    for n in range(4):
        assert seq[n].P_n == parse_polynomial(two_poles_golden[f"P_{n}"])


@pytest.mark.parametrize(
    "P, Q, T, z0",
    [
        (["1"], ["0", "-1", "1"], ["0", "1"], "1/3+i"),
        (["2", "1", "1"], Polynomial.from_roots(["1", "i", "-1"]).to_strings(), ["0", "0", "1"], "2-i"),
        (["1/2", "i"], ["3", "0", "0", "-2i"], ["1", "-1/3", "0", "i"], "1/2"),
    ],
)
def test_recursion_matches_taylor_oracle(P, Q, T, z0):
    inst = ProblemInstance.create(P, Q, T, locate_poles=False)
    seq = generate_sequence(inst, 6)
    z0 = parse_coefficient(z0)
    oracle = taylor_oracle(inst.P, inst.Q, inst.T, z0, 6)
    assert [e.P_n(z0) for e in seq.entries] == oracle


def test_recursion_step_rejects_nonpositive(two_poles):
    with pytest.raises(ValueError):
        recursion_step(two_poles.P, two_poles, 0)


def test_non_monic_leading_coefficient():
    # Q = 3 z (z - 1), T = -2 z^2: A_n = (3 * -2 * 2)^n
    inst = ProblemInstance.create(["1"], ["0", "-3", "3"], ["0", "0", "-2"], locate_poles=False)
    seq = generate_sequence(inst, 8)
    for e in seq.entries:
        assert e.A_n == closed_form_leading_coeff(e.n, inst) == G(-12) ** e.n


def test_value_at_zero_requires_pole_at_origin():
    inst = ProblemInstance.create(["1"], ["1", "0", "1"], ["0", "1"], locate_poles=False)
    with pytest.raises(ValueError):
        closed_form_value_at_zero(2, inst)


@st.composite
def instances(draw):
    q = draw(st.integers(2, 4))
    roots = draw(st.lists(gauss, min_size=q, max_size=q, unique=True))
    T = draw(st.lists(gauss, min_size=2, max_size=4).filter(lambda c: not c[-1].is_zero()))
    P = draw(st.lists(gauss, min_size=1, max_size=3).filter(lambda c: not c[-1].is_zero()))
    Q = Polynomial.from_roots(roots, lead=draw(gauss.filter(lambda c: not c.is_zero())))
    try:
        return ProblemInstance.create(Polynomial(P), Q, Polynomial(T), locate_poles=False)
    except HypothesisViolation:
        from hypothesis import reject

        reject()


@settings(max_examples=30, deadline=None)
@given(instances())
def test_degree_and_leading_laws(inst):
    seq = generate_sequence(inst, 6)
    for e in seq.entries:
        assert e.m_n == inst.degree(e.n)
        assert e.A_n == closed_form_leading_coeff(e.n, inst)


@settings(max_examples=20, deadline=None)
@given(instances(), st.sampled_from([Fraction(1, 3), Fraction(2), Fraction(5, 2)]), gauss)
def test_covariance(inst, tau, a):
    seq = generate_sequence(inst, 4)
    hat = generate_sequence(transform_instance(inst, tau, a, locate_poles=False), 4)
    for e, h in zip(seq.entries, hat.entries):
        assert h.P_n == scale_translate_sequence(e.P_n, e.n, tau, a)
        assert h.A_n == G(tau) ** (e.n * (inst.q + inst.t) + inst.p) * e.A_n


def test_transform_rejects_nonpositive_tau(two_poles):
    with pytest.raises(ValueError):
        transform_instance(two_poles, -1, 0, locate_poles=False)


# --------------------------------------------------------------------------
# hypothesis violations and resource limits
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "P, Q, T, match",
    [
        (["0"], ["0", "-1", "1"], ["0", "1"], "identically zero"),
        (["1"], ["1", "1"], ["0", "1"], "degree >= 2"),
        (["1"], ["0", "0", "1"], ["0", "1"], "repeated zero"),
        (["0", "1"], ["0", "-1", "1"], ["0", "1"], "common factor"),
    ],
)
def test_hypothesis_violations(P, Q, T, match):
    with pytest.raises(HypothesisViolation, match=match):
        ProblemInstance.create(P, Q, T, locate_poles=False)


def test_constant_exponent_is_rational_case():
    with pytest.raises(ConstantExponentError, match="purely rational"):
        ProblemInstance.create(["1"], ["0", "-1", "1"], ["5"], locate_poles=False)


def test_resource_limit(two_poles):
    with pytest.raises(ResourceLimitExceeded) as info:
        generate_sequence(two_poles, 40, max_coeff_bits=20)
    assert 0 < info.value.n_reached < 40


def test_instance_locates_poles(five_poles):
    poles = sorted((complex(z) for z in five_poles.Q_zeros), key=lambda w: (w.real, w.imag))
    expected = sorted([0, -2, 4 + 3j, 3 - 5j, -3 - 9j], key=lambda w: (w.real, w.imag))
    assert all(abs(a - b) < 1e-60 for a, b in zip(poles, expected))
    assert five_poles.has_pole_at("4+3i") and not five_poles.has_pole_at("1")
