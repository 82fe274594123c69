"""Legendre polynomials, orthonormal bases on an interval, and exact
rational polynomial arithmetic.

Polynomials live on the reference interval [-1, 1] and keep their
coefficients as `fractions.Fraction`, so every add, multiply, integrate
and evaluate is exact.  The orthonormal bases on [t, T] are

  legendre:       phi_j(s) = sqrt((2j+1)/(T-t)) * P_j((2s - T - t)/(T-t))
  trigonometric:  phi_0(s) = 1/sqrt(T-t),
                  phi_{2r-1}(s) = sqrt(2/(T-t)) * sin(2*pi*r*(s-t)/(T-t)),
                  phi_{2r}(s)   = sqrt(2/(T-t)) * cos(2*pi*r*(s-t)/(T-t)).

Everything here is a pure function on immutable values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

LEGENDRE = "legendre"
TRIGONOMETRIC = "trigonometric"
BASES = (LEGENDRE, TRIGONOMETRIC)

#: Default cap on polynomial degree.  High-multiplicity nested integration
#: grows degrees additively, so runaway inputs are caught early instead of
#: exhausting memory.
DEGREE_CAP = 64


class DegreeCapError(ValueError):
    """Raised when an operation would exceed the configured degree cap."""


def _check_basis(basis: str) -> str:
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}; expected one of {BASES}")
    return basis


@dataclass(frozen=True)
class Interval:
    """Integration interval [t, T] with T > t."""

    t: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.T)):
            raise ValueError("interval endpoints must be finite")
        if not self.T > self.t:
            raise ValueError(f"interval needs T > t, got [{self.t}, {self.T}]")

    @property
    def length(self) -> float:
        return self.T - self.t


class RationalPoly:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are indexed by monomial degree.  Trailing zeros are
    stripped so two equal polynomials always compare equal.  The zero
    polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({list(self.coeffs)!r})"

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, RationalPoly):
            if not self.coeffs or not other.coeffs:
                return RationalPoly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RationalPoly(out)
        if isinstance(other, (int, Rational)):
            return RationalPoly([c * other for c in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def eval(self, x):
        """Evaluate by Horner's rule; exact when x is rational."""
        acc = Fraction(0) if isinstance(x, (int, Rational)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        """Evaluate at a float scalar or numpy array."""
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def to_dict(self) -> dict:
        """Lossless serialization: coefficients as "num/den" strings."""
        return {"coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d: dict) -> "RationalPoly":
        return cls([Fraction(s) for s in d["coeffs"]])


_ONE = RationalPoly([1])
_X = RationalPoly([0, 1])

_legendre_cache: list[RationalPoly] = [_ONE, _X]


def legendre_poly(n: int, degree_cap: int = DEGREE_CAP) -> RationalPoly:
    """Legendre polynomial P_n on [-1, 1] with exact coefficients.

    Uses the Bonnet recurrence
    (n+1) P_{n+1}(x) = (2n+1) x P_n(x) - n P_{n-1}(x).

    Args:
        n: polynomial index, n >= 0.
        degree_cap: refuse indices above this bound.

    Returns:
        RationalPoly with P_n(1) = 1.
    """
    if n < 0:
        raise ValueError(f"Legendre index must be >= 0, got {n}")
    if n > degree_cap:
        raise DegreeCapError(f"Legendre index {n} exceeds degree cap {degree_cap}")
    while len(_legendre_cache) <= n:
        m = len(_legendre_cache) - 1
        pm, pm1 = _legendre_cache[m], _legendre_cache[m - 1]
        nxt = (_X * pm * (2 * m + 1) - pm1 * m) * Fraction(1, m + 1)
        _legendre_cache.append(nxt)
    return _legendre_cache[n]


def poly_integrate_from(p: RationalPoly, lower) -> RationalPoly:
    """Antiderivative q of p with q(lower) = 0, exactly.

    Args:
        p: integrand polynomial.
        lower: rational lower limit.

    Returns:
        q with q(y) = integral of p from `lower` to y.
    """
    out = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(p.coeffs)]
    q = RationalPoly(out)
    shift = q.eval(Fraction(lower))
    if shift:
        out[0] = -shift
        q = RationalPoly(out)
    return q


def reference_point(s, iv: Interval):
    """Map s in [t, T] to x in [-1, 1]."""
    return (2.0 * np.asarray(s, dtype=float) - iv.T - iv.t) / iv.length


def basis_eval(basis: str, j: int, s: float, iv: Interval) -> float:
    """Evaluate the j-th orthonormal basis function at a point.

    Args:
        basis: "legendre" or "trigonometric".
        j: basis index, j >= 0.
        s: evaluation point; must lie in [t, T].
        iv: the interval.

    Returns:
        phi_j(s).

    Raises:
        ValueError: if s lies outside [t, T] or j < 0.
    """
    _check_basis(basis)
    if j < 0:
        raise ValueError(f"basis index must be >= 0, got {j}")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < iv.t) or np.any(s_arr > iv.T):
        raise ValueError(f"point {s} outside interval [{iv.t}, {iv.T}]")
    out = basis_eval_unchecked(basis, j, s_arr, iv)
    return float(out) if np.ndim(s) == 0 else out


def basis_eval_unchecked(basis: str, j: int, s, iv: Interval):
    """Vectorized basis evaluation without the domain check.

    Quadrature code calls this on node arrays that are inside [t, T] by
    construction.
    """
    length = iv.length
    if basis == LEGENDRE:
        x = reference_point(s, iv)
        return math.sqrt((2 * j + 1) / length) * legendre_poly(j).eval_float(x)
    if j == 0:
        return np.full_like(np.asarray(s, dtype=float), 1.0 / math.sqrt(length))
    r = (j + 1) // 2
    angle = 2.0 * math.pi * r * (np.asarray(s, dtype=float) - iv.t) / length
    fn = np.sin if j % 2 == 1 else np.cos
    return math.sqrt(2.0 / length) * fn(angle)


def basis_integral(basis: str, j: int, iv: Interval) -> float:
    """Integral of phi_j over [t, T].

    For both bases this is sqrt(T-t) for j = 0 and exactly 0 otherwise
    (full sine and cosine periods integrate to zero).
    """
    _check_basis(basis)
    return math.sqrt(iv.length) if j == 0 else 0.0
