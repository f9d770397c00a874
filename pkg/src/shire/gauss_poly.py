"""Exact polynomial arithmetic over the Gaussian rationals.

Coefficients are complex numbers whose real and imaginary parts are
:class:`fractions.Fraction` values.  Polynomials are immutable tuples of
coefficients in ascending power order; the zero polynomial is the empty
tuple.

The module also implements the numerator recursion for the iterated
derivatives of ``f = (P/Q) exp(T)``::

    f^(n) = P_n / Q^(n+1) * exp(T)
    P_n   = (Q T' - n Q') P_{n-1} + Q P_{n-1}'

together with the closed forms for the degree, leading coefficient and
value at a pole placed at the origin.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

__all__ = [
    "GaussianRational",
    "Polynomial",
    "ProblemInstance",
    "SequenceEntry",
    "DerivativeSequence",
    "HypothesisViolation",
    "ConstantExponentError",
    "ResourceLimitExceeded",
    "poly_arith",
    "poly_derivative",
    "poly_gcd",
    "recursion_step",
    "generate_sequence",
    "closed_form_leading_coeff",
    "closed_form_value_at_zero",
    "scale_translate_sequence",
    "transform_instance",
    "parse_coefficient",
    "parse_polynomial",
]

Number = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """Complex number with rational real and imaginary parts.

    Both parts are stored as reduced :class:`~fractions.Fraction` objects,
    so equality and hashing are canonical.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction | str = 0, im: int | Fraction | str = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value: Number | str) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return parse_coefficient(value)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value))

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    # comparisons / conversion -----------------------------------------
    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_mpc(self):
        """Round to an :class:`mpmath.mpc` at the current mpmath precision."""
        import mpmath

        return mpmath.mpc(
            mpmath.mpf(self.re.numerator) / self.re.denominator,
            mpmath.mpf(self.im.numerator) / self.im.denominator,
        )

    def __repr__(self):
        return f"GaussianRational({self!s})"

    def __str__(self):
        return format_coefficient(self)


def _coerce_or_none(value) -> GaussianRational | None:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    if isinstance(value, complex):
        return GaussianRational(Fraction(value.real), Fraction(value.imag))
    return None


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


# --------------------------------------------------------------------------
# Text format: "a/b+c/di", ascending coefficient lists
# --------------------------------------------------------------------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_COEFF_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?P<im>[+-](?:\d+(?:/\d+)?)?i)?|(?P<pim>[+-]?(?:\d+(?:/\d+)?)?i))$"
)


def _parse_imag(text: str) -> Fraction:
    body = text[:-1]
    if body in ("", "+"):
        return Fraction(1)
    if body == "-":
        return Fraction(-1)
    return Fraction(body)


def parse_coefficient(text: str) -> GaussianRational:
    """Parse ``"a/b+c/di"`` style strings.

    Accepted forms include ``"3"``, ``"-1/2"``, ``"2i"``, ``"-i"``,
    ``"1/2-3/4i"`` and ``"4+3i"``.  Whitespace is ignored.
    """
    s = "".join(str(text).split())
    m = _COEFF_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse coefficient {text!r}")
    try:
        if m.group("pim") is not None:
            return GaussianRational(0, _parse_imag(m.group("pim")))
        re_part = Fraction(m.group("re"))
        im_part = _parse_imag(m.group("im")) if m.group("im") else Fraction(0)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in coefficient {text!r}") from None
    return GaussianRational(re_part, im_part)


def format_coefficient(c: GaussianRational) -> str:
    """Inverse of :func:`parse_coefficient`."""
    if c.im == 0:
        return str(c.re)
    im = c.im
    if abs(im) == 1:
        im_txt = "i"
    else:
        im_txt = f"{abs(im)}i"
    if c.re == 0:
        return ("-" if im < 0 else "") + im_txt
    return f"{c.re}{'-' if im < 0 else '+'}{im_txt}"


def parse_polynomial(coeffs: Sequence[str | int]) -> Polynomial:
    """Build a polynomial from an ascending list of coefficient strings."""
    return Polynomial(GaussianRational.coerce(c) for c in coeffs)


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


class Polynomial:
    """Immutable polynomial with Gaussian-rational coefficients.

    ``coeffs[k]`` is the coefficient of ``z**k``.  Trailing zero
    coefficients are stripped, so the zero polynomial has ``coeffs == ()``
    and ``degree == -1``.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Number | str] = ()):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_roots(cls, roots: Iterable[Number | str], lead: Number = 1) -> Polynomial:
        result = cls([lead])
        for r in roots:
            result = result * cls([-GaussianRational.coerce(r), ONE])
        return result

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> Polynomial:
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> GaussianRational:
        if not self.coeffs:
            return ZERO
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int) -> GaussianRational:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return poly_arith(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return poly_arith(self, other, "sub")

    def __rsub__(self, other):
        return Polynomial([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return poly_arith(self, other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def scale(self, c: Number) -> Polynomial:
        c = GaussianRational.coerce(c)
        return Polynomial(c * a for a in self.coeffs)

    def derivative(self) -> Polynomial:
        return poly_derivative(self)

    def __call__(self, z: Number) -> GaussianRational:
        """Exact Horner evaluation at a Gaussian rational."""
        z = GaussianRational.coerce(z)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def compose_affine(self, tau: Number, a: Number) -> Polynomial:
        """Return ``self(tau*z + a)``."""
        tau = GaussianRational.coerce(tau)
        a = GaussianRational.coerce(a)
        inner = Polynomial([a, tau])
        acc = Polynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + Polynomial([c])
        return acc

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        """Exact Euclidean division."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead_inv = ONE / other.leading
        quot = [ZERO] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * lead_inv
            if c.is_zero():
                continue
            quot[k - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - c * b
        return Polynomial(quot), Polynomial(rem[:dq])

    def __mod__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[1]

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        return self.scale(ONE / self.leading)

    def to_mpc_coeffs(self):
        """Coefficients rounded to the current mpmath precision."""
        return [c.to_mpc() for c in self.coeffs]

    def max_coeff_bits(self) -> int:
        """Bit length of the largest numerator/denominator among coefficients."""
        best = 0
        for c in self.coeffs:
            for r in (c.re, c.im):
                best = max(best, r.numerator.bit_length(), r.denominator.bit_length())
        return best


def _integer_form(p: Polynomial) -> tuple[list[int], list[int], int]:
    """Scale ``p`` to Gaussian-integer coefficients over a common denominator."""
    den = 1
    for c in p.coeffs:
        den = math.lcm(den, c.re.denominator, c.im.denominator)
    re_ = [c.re.numerator * (den // c.re.denominator) for c in p.coeffs]
    im_ = [c.im.numerator * (den // c.im.denominator) for c in p.coeffs]
    return re_, im_, den


def _mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero() or b.is_zero():
        return Polynomial()
    ar, ai, ad = _integer_form(a)
    br, bi, bd = _integer_form(b)
    n = len(ar) + len(br) - 1
    rr = [0] * n
    ri = [0] * n
    a_real = not any(ai)
    b_real = not any(bi)
    for j, (xr, xi) in enumerate(zip(ar, ai)):
        if xr == 0 and xi == 0:
            continue
        for k, (yr, yi) in enumerate(zip(br, bi)):
            if a_real and b_real:
                rr[j + k] += xr * yr
            else:
                rr[j + k] += xr * yr - xi * yi
                ri[j + k] += xr * yi + xi * yr
    den = ad * bd
    return Polynomial(
        GaussianRational(Fraction(x, den), Fraction(y, den)) for x, y in zip(rr, ri)
    )


def poly_arith(a: Polynomial, b: Polynomial, kind: str) -> Polynomial:
    """Exact ``add``, ``sub`` or ``mul`` of two polynomials."""
    if kind == "mul":
        return _mul(a, b)
    if kind not in ("add", "sub"):
        raise ValueError(f"unknown arithmetic kind {kind!r}")
    n = max(len(a), len(b))
    if kind == "add":
        return Polynomial(a[k] + b[k] for k in range(n))
    return Polynomial(a[k] - b[k] for k in range(n))


def poly_derivative(a: Polynomial) -> Polynomial:
    """Formal derivative."""
    return Polynomial(c * k for k, c in enumerate(a.coeffs) if k > 0)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (zero polynomial if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _is_unit(p: Polynomial) -> bool:
    return p.degree == 0


# --------------------------------------------------------------------------
# Problem instances and the derivative sequence
# --------------------------------------------------------------------------


class HypothesisViolation(ValueError):
    """The data (P, Q, T) does not satisfy the standing assumptions."""


class ConstantExponentError(HypothesisViolation):
    """``deg T = 0``: the pure rational case ``(P/Q)^(n)``, treated elsewhere."""


class ResourceLimitExceeded(RuntimeError):
    """Coefficient growth exceeded the configured cap during generation."""

    def __init__(self, message: str, n_reached: int):
        super().__init__(message)
        self.n_reached = n_reached


@dataclass(frozen=True)
class ProblemInstance:
    """The data ``f = (P/Q) exp(T)`` plus numerically located poles.

    Use :meth:`create` rather than the constructor; it validates the
    hypotheses exactly and locates the zeros of ``Q``.
    """

    P: Polynomial
    Q: Polynomial
    T: Polynomial
    Q_zeros: tuple = field(default=(), compare=False, repr=False)
    precision_bits: int = field(default=256, compare=False, repr=False)

    @property
    def p(self) -> int:
        return self.P.degree

    @property
    def q(self) -> int:
        return self.Q.degree

    @property
    def t(self) -> int:
        return self.T.degree

    @property
    def b_p(self) -> GaussianRational:
        return self.P.leading

    @property
    def c_q(self) -> GaussianRational:
        return self.Q.leading

    @property
    def d_t(self) -> GaussianRational:
        return self.T.leading

    def degree(self, n: int) -> int:
        """``m_n = n (q + t - 1) + p``."""
        return n * (self.q + self.t - 1) + self.p

    @classmethod
    def create(
        cls,
        P: Polynomial | Sequence[str],
        Q: Polynomial | Sequence[str],
        T: Polynomial | Sequence[str],
        precision_bits: int = 256,
        locate_poles: bool = True,
    ) -> ProblemInstance:
        P, Q, T = (x if isinstance(x, Polynomial) else parse_polynomial(x) for x in (P, Q, T))
        check_hypotheses(P, Q, T)
        zeros: tuple = ()
        if locate_poles:
            from .rootfind import find_roots

            zeros = tuple(find_roots(Q, precision_bits=precision_bits).roots)
        return cls(P, Q, T, zeros, precision_bits)

    def has_pole_at(self, a) -> bool:
        return self.Q(a).is_zero()


def check_hypotheses(P: Polynomial, Q: Polynomial, T: Polynomial) -> None:
    """Raise :class:`HypothesisViolation` unless the standing assumptions hold."""
    if P.is_zero():
        raise HypothesisViolation("P must not be identically zero")
    if Q.degree < 2:
        raise HypothesisViolation(f"Q must have degree >= 2, got {Q.degree}")
    if T.degree < 1:
        raise ConstantExponentError(
            "T is constant (t = 0); this is the purely rational case (P/Q)^(n), "
            "where the limit potential is (max log|z - z_i|^-1 + log|Q|)/(q - 1) "
            "and is not handled here"
        )
    if not _is_unit(poly_gcd(Q, Q.derivative())):
        raise HypothesisViolation("Q has a repeated zero (gcd(Q, Q') is not constant)")
    if not _is_unit(poly_gcd(P, Q)):
        raise HypothesisViolation("P and Q share a common factor (gcd(P, Q) is not constant)")


@dataclass(frozen=True)
class SequenceEntry:
    n: int
    P_n: Polynomial
    A_n: GaussianRational
    m_n: int


@dataclass
class DerivativeSequence:
    """``P_0, ..., P_{n_max}`` for one instance."""

    instance: ProblemInstance
    entries: list[SequenceEntry]

    def __getitem__(self, n: int) -> SequenceEntry:
        entry = self.entries[n]
        assert entry.n == n
        return entry

    def __len__(self):
        return len(self.entries)

    @property
    def n_max(self) -> int:
        return self.entries[-1].n

    def polynomials(self) -> list[Polynomial]:
        return [e.P_n for e in self.entries]


def recursion_step(P_prev: Polynomial, instance: ProblemInstance, n: int) -> Polynomial:
    """``P_n = (Q T' - n Q') P_{n-1} + Q P_{n-1}'``."""
    if n <= 0:
        raise ValueError(f"recursion index must be >= 1, got {n}")
    Q = instance.Q
    factor = Q * instance.T.derivative() - Q.derivative().scale(n)
    return factor * P_prev + Q * P_prev.derivative()


def generate_sequence(
    instance: ProblemInstance,
    n_max: int,
    max_coeff_bits: int | None = None,
    check: bool = True,
) -> DerivativeSequence:
    """Generate ``P_0 .. P_{n_max}`` exactly.

    With ``check`` on, every entry is verified against the degree law and
    for coprimality with ``Q``; a failure there is a bug, so it raises
    ``AssertionError``.  ``max_coeff_bits`` caps the bit size of any
    numerator/denominator and raises :class:`ResourceLimitExceeded`.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    P = instance.P
    entries = [SequenceEntry(0, P, P.leading, P.degree)]
    current = P
    for n in range(1, n_max + 1):
        current = recursion_step(current, instance, n)
        if max_coeff_bits is not None and current.max_coeff_bits() > max_coeff_bits:
            raise ResourceLimitExceeded(
                f"coefficient size exceeded {max_coeff_bits} bits at n={n}", n_reached=n - 1
            )
        entry = SequenceEntry(n, current, current.leading, current.degree)
        if check:
            assert entry.m_n == instance.degree(n), (n, entry.m_n)
            assert _is_unit(poly_gcd(instance.Q, current % instance.Q)), n
        entries.append(entry)
    return DerivativeSequence(instance, entries)


def closed_form_leading_coeff(n: int, instance: ProblemInstance) -> GaussianRational:
    """``A_n = (c_q d_t t)^n b_p``; for monic ``Q`` this is ``(d_t t)^n b_p``.

    Each step multiplies the leading coefficient by that of ``Q T'``.
    """
    if instance.t < 1:
        raise ConstantExponentError("leading-coefficient law needs deg T >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    return (instance.c_q * instance.d_t * instance.t) ** n * instance.b_p


def closed_form_value_at_zero(n: int, instance: ProblemInstance) -> GaussianRational:
    """``P_n(0) = n! (-Q'(0))^n P(0)`` for instances with a pole at 0."""
    if not instance.Q[0].is_zero():
        raise ValueError("closed form for P_n(0) requires Q(0) = 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    return GaussianRational(math.factorial(n)) * (-instance.Q[1]) ** n * instance.P[0]


def _positive_rational(tau) -> Fraction:
    if isinstance(tau, GaussianRational):
        if tau.im != 0:
            raise ValueError("tau must be real")
        tau = tau.re
    tau = Fraction(tau)
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return tau


def scale_translate_sequence(P_n: Polynomial, n: int, tau, a) -> Polynomial:
    """``tau^n P_n(tau z + a)``: the numerator for ``f(tau z + a)``."""
    tau = _positive_rational(tau)
    return P_n.compose_affine(tau, a).scale(tau**n)


def transform_instance(instance: ProblemInstance, tau, a, locate_poles: bool = True) -> ProblemInstance:
    """Instance for ``f(tau z + a)``; ``Q`` is generally no longer monic."""
    tau = _positive_rational(tau)
    a = GaussianRational.coerce(a)
    return ProblemInstance.create(
        instance.P.compose_affine(tau, a),
        instance.Q.compose_affine(tau, a),
        instance.T.compose_affine(tau, a),
        precision_bits=instance.precision_bits,
        locate_poles=locate_poles,
    )


def product(values: Iterable[Polynomial]) -> Polynomial:
    return reduce(lambda x, y: x * y, values, Polynomial([1]))
