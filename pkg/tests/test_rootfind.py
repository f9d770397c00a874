import io

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shire.gauss_poly import GaussianRational, Polynomial
from shire.rootfind import (
    NonConvergence,
    certify_roots,
    default_precision,
    empirical_measure,
    find_roots,
    write_zeros_csv,
)


def _match(found, expected):
    """Max distance after greedy nearest matching."""
    found = list(found)
    worst = 0.0
    for e in expected:
        d = [abs(f - e) for f in found]
        k = int(np.argmin(d))
        worst = max(worst, d[k])
        found.pop(k)
    return worst


def test_known_roots_high_precision():
    roots = ["1/3", "-2+i", "5i", "7/2-1/4i", "-1"]
    rs = find_roots(Polynomial.from_roots(roots), precision_bits=256)
    with mpmath.workprec(256):
        expected = [GaussianRational.coerce(r).to_mpc() for r in roots]
        err = _match([mpmath.mpc(r) for r in rs.roots], expected)
    assert err < mpmath.mpf(2) ** -200


def test_zeros_at_origin_split_off():
    p = Polynomial.from_roots(["0", "0", "0", "2", "-1+i"])
    rs = find_roots(p)
    assert len(rs) == 5
    assert sum(1 for r in rs.roots if r == 0) == 3


def test_linear_and_constant():
    assert complex(find_roots(Polynomial(["3", "-2"])).roots[0]) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        find_roots(Polynomial(["4"]))


def test_precision_floor():
    with pytest.raises(ValueError):
        find_roots(Polynomial(["1", "0", "1"]), precision_bits=32)


def test_nonconvergence_reported():
    p = Polynomial.from_roots([str(k) for k in range(1, 30)])
    with pytest.raises(NonConvergence):
        find_roots(p, precision_bits=128, max_sweeps=0)


def test_default_precision_grows():
    assert default_precision(1) == 256
    assert default_precision(100) > default_precision(50) > 256


@pytest.mark.parametrize("offset", [1, 2, 5])
def test_seed_offset_changes_path_not_answer(offset):
    p = Polynomial.from_roots(["2", "-3i", "1+i", "-4", "1/2"]) * Polynomial(["1", "1", "0", "1"])
    a = find_roots(p, precision_bits=192).as_complex()
    b = find_roots(p, precision_bits=192, seed_offset=offset).as_complex()
    assert np.max(np.abs(a - b)) < 1e-14


def test_certification_flags_clusters():
    p = Polynomial.from_roots(["1", "1+1/10000000000000000000000i", "-2"])
    rs = find_roots(p, precision_bits=128)
    rep = certify_roots(p, rs)
    assert rep.ok
    assert rep.clusters  # 1e-22 apart, below 2**-32
    assert rep.min_separation < 1e-20


def test_certification_flags_bad_roots():
    p = Polynomial.from_roots(["1", "2", "3"])
    rs = find_roots(p)
    perturbed = type(rs)(tuple(r + mpmath.mpf("1e-3") for r in rs.roots), 3, rs.residual_bound, 256)
    assert not certify_roots(p, perturbed).ok


def test_empirical_measure():
    rs = find_roots(Polynomial.from_roots(["1", "2", "3", "4"]))
    mu = empirical_measure(rs, n=2)
    assert mu.total_weight == pytest.approx(1.0, abs=1e-15)
    assert mu.m_n == 4 and len(mu.locations()) == 4


def test_empirical_measure_needs_complete_set():
    rs = find_roots(Polynomial.from_roots(["1", "2"]))
    short = type(rs)(rs.roots[:1], 2, rs.residual_bound, 256)
    with pytest.raises(ValueError):
        empirical_measure(short, 1)


def test_zeros_csv_format():
    p = Polynomial.from_roots(["1", "-i"])
    rs = find_roots(p)
    buf = io.StringIO()
    write_zeros_csv(buf, [(3, rs, certify_roots(p, rs).residuals)])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,index,re,im,residual"
    assert len(lines) == 3 and lines[1].startswith("3,0,")


small_int = st.integers(-6, 6)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(small_int, small_int), min_size=2, max_size=9))
def test_recovers_integer_roots_with_multiplicity(pairs):
    roots = [GaussianRational(a, b) for a, b in pairs]
    p = Polynomial.from_roots(roots)
    rs = find_roots(p, precision_bits=256)
    assert len(rs) == len(roots)
    # multiple roots of order k are only determined to about eps**(1/k)
    mult = max(pairs.count(x) for x in pairs)
    tol = 2.0 ** (-120 / mult)
    assert _match(rs.as_complex(), [complex(r) for r in roots]) < max(tol, 1e-12)


def test_two_poles_zero_count(two_poles):
    from shire.gauss_poly import generate_sequence

    seq = generate_sequence(two_poles, 20)
    rs = find_roots(seq[20].P_n, precision_bits=default_precision(20))
    assert len(rs) == 40
    assert certify_roots(seq[20].P_n, rs).ok
