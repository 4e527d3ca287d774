"""Exact scalars for the ladder-operator engine.

A :class:`UnitScalar` is a Laurent polynomial ``sum_k c_k * q**k`` in a single
formal deformation parameter ``q`` constrained to the complex unit circle.
Coefficients are Gaussian rationals (exact complex numbers whose real and
imaginary parts are :class:`fractions.Fraction`), so zero-testing and equality
are exact and never a floating-point judgement.

Because ``|q| = 1``, complex conjugation acts on the ring by conjugating every
coefficient and negating every exponent (``q**k -> q**-k``); numeric
evaluation substitutes ``q = exp(i*theta)``.

Representation: a sparse ``{exponent: coefficient}`` mapping that never stores
a zero coefficient, so equal ring elements always compare equal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

_F0 = Fraction(0)
_F1 = Fraction(1)


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    re: Fraction = _F0
    im: Fraction = _F0

    def __post_init__(self):
        object.__setattr__(self, "re", _fraction(self.re))
        object.__setattr__(self, "im", _fraction(self.im))

    @classmethod
    def coerce(cls, value: "GaussianLike") -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(_fraction(value))
        if isinstance(value, tuple) and len(value) == 2:
            return cls(_fraction(value[0]), _fraction(value[1]))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __add__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "GaussianRational":
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        base = self if k >= 0 else self.inverse()
        out = GaussianRational(_F1)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __complex__(self) -> complex:
        return float(self.re) + 1j * float(self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"({self.re},{self.im})"


GaussianLike = Union[GaussianRational, int, Fraction, tuple]
ScalarLike = Union["UnitScalar", GaussianLike]

_G0 = GaussianRational()
_G1 = GaussianRational(_F1)


class UnitScalar:
    """Element of the Laurent ring in the unit-modulus parameter ``q``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, GaussianLike] | None = None):
        data: dict[int, GaussianRational] = {}
        for k, c in (coeffs or {}).items():
            c = GaussianRational.coerce(c)
            if not c.is_zero:
                data[int(k)] = c
        self._coeffs = data

    @classmethod
    def coerce(cls, value: ScalarLike) -> "UnitScalar":
        if isinstance(value, UnitScalar):
            return value
        return cls({0: GaussianRational.coerce(value)})

    @classmethod
    def zero(cls) -> "UnitScalar":
        return cls()

    @classmethod
    def one(cls) -> "UnitScalar":
        return cls({0: _G1})

    @classmethod
    def q_power(cls, k: int, coeff: GaussianLike = 1) -> "UnitScalar":
        """The monomial ``coeff * q**k``."""
        return cls({int(k): GaussianRational.coerce(coeff)})

    def items(self) -> tuple[tuple[int, GaussianRational], ...]:
        """Exponent/coefficient pairs, ascending exponent."""
        return tuple(sorted(self._coeffs.items()))

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_one(self) -> bool:
        return self._coeffs == {0: _G1}

    def __add__(self, other: ScalarLike):
        try:
            other = UnitScalar.coerce(other)
        except TypeError:
            return NotImplemented
        data = dict(self._coeffs)
        for k, c in other._coeffs.items():
            s = data.get(k, _G0) + c
            if s.is_zero:
                data.pop(k, None)
            else:
                data[k] = s
        return UnitScalar(data)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike):
        try:
            other = UnitScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: ScalarLike):
        try:
            other = UnitScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __neg__(self) -> "UnitScalar":
        return UnitScalar({k: -c for k, c in self._coeffs.items()})

    def __mul__(self, other: ScalarLike):
        try:
            other = UnitScalar.coerce(other)
        except TypeError:
            return NotImplemented
        data: dict[int, GaussianRational] = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                k = k1 + k2
                s = data.get(k, _G0) + c1 * c2
                if s.is_zero:
                    data.pop(k, None)
                else:
                    data[k] = s
        return UnitScalar(data)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UnitScalar":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        base = self if n >= 0 else self.inverse()
        out = UnitScalar.one()
        for _ in range(abs(n)):
            out = out * base
        return out

    def conj(self) -> "UnitScalar":
        """Complex conjugation on the unit circle: conjugate coefficients, negate exponents."""
        return UnitScalar({-k: c.conj() for k, c in self._coeffs.items()})

    def as_monomial(self) -> tuple[GaussianRational, int] | None:
        """Return ``(c, k)`` if this is a single term ``c*q**k``, else None."""
        if len(self._coeffs) != 1:
            return None
        ((k, c),) = self._coeffs.items()
        return c, k

    def as_unit_monomial(self) -> tuple[GaussianRational, int] | None:
        """Like :meth:`as_monomial` but additionally requires ``|c| = 1``."""
        mono = self.as_monomial()
        if mono is None or mono[0].norm2() != 1:
            return None
        return mono

    def inverse(self) -> "UnitScalar":
        """Multiplicative inverse; defined for monomials ``c*q**k`` with ``c != 0``."""
        mono = self.as_monomial()
        if mono is None:
            raise ValueError(f"only monomials are invertible, got {self}")
        c, k = mono
        return UnitScalar({-k: c.inverse()})

    def substitute_unit(self, value: GaussianLike) -> "UnitScalar":
        """Specialize ``q`` to an exact unit-modulus value (e.g. -1), collapsing all exponents."""
        c = GaussianRational.coerce(value)
        if c.norm2() != 1:
            raise ValueError(f"substitution value must have unit modulus, got {c}")
        total = _G0
        for k, coeff in self._coeffs.items():
            total = total + coeff * c**k
        return UnitScalar({0: total})

    def eval_at(self, theta: float) -> complex:
        """Numeric value at ``q = exp(i*theta)``."""
        if not math.isfinite(theta):
            raise ValueError("theta must be finite")
        return sum(
            (complex(c) * cmath.exp(1j * k * theta) for k, c in self._coeffs.items()),
            0j,
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational, tuple)):
            other = UnitScalar.coerce(other)
        if not isinstance(other, UnitScalar):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self.items())

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k, c in self.items():
            if k == 0:
                parts.append(str(c))
                continue
            qpart = "q" if k == 1 else f"q^{k}"
            if c == _G1:
                parts.append(qpart)
            elif c == GaussianRational(Fraction(-1)):
                parts.append(f"-{qpart}")
            else:
                parts.append(f"{c}*{qpart}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"UnitScalar({self})"


def qpow(k: int = 1, coeff: GaussianLike = 1) -> UnitScalar:
    """Convenience constructor for ``coeff * q**k``."""
    return UnitScalar.q_power(k, coeff)


#: the bare deformation parameter
Q = qpow(1)

#: the exact imaginary unit as a ring constant
I_UNIT = UnitScalar({0: GaussianRational(_F0, _F1)})


def unit_values() -> tuple[GaussianRational, ...]:
    """The four exact roots of unity available in the coefficient field."""
    return (
        GaussianRational(_F1),
        GaussianRational(Fraction(-1)),
        GaussianRational(_F0, _F1),
        GaussianRational(_F0, Fraction(-1)),
    )
