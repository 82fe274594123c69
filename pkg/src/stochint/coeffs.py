"""Fourier coefficients of the ordered-simplex kernel.

The kernel of a k-fold nested integral with weights psi_l is
psi_1(t_1) ... psi_k(t_k) on the region t < t_1 < ... < t_k < T and zero
elsewhere.  Its Fourier coefficient against a product of orthonormal
basis functions phi_{j_1} ... phi_{j_k} is the nested integral

    C_{j_k ... j_1} = int_t^T psi_k phi_{j_k} ... int_t^{t_2} psi_1 phi_{j_1}
                      dt_1 ... dt_k,

with j_1 attached to the innermost variable throughout this package.

For the Legendre basis and monomial weights psi_l(s) = (t - s)^{l_l} the
computation reduces, after mapping to [-1, 1], to exact rational
arithmetic: the reduced coefficient is

    cbar = int_{-1}^{1} P_{j_k} w_k ... int_{-1}^{x_2} P_{j_1} w_1 dx_1 ... dx_k

with w_l(x) = (-(x+1))^{l_l}, and the scaled coefficient on [t, T] is

    c = prod_l sqrt(2 j_l + 1) * (T-t)^(k/2 + L) / 2^(k + L) * cbar,

where L is the sum of the weight exponents.  The sign convention on w_l
absorbs the minus signs that the affine change of variables introduces,
so the scaling stays sign-free.

Any other basis or weight goes through `coeff_numeric`, a nested
Gauss-Legendre quadrature that also serves as the independent oracle for
the exact path.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .orthopoly import (
    DEGREE_CAP,
    LEGENDRE,
    TRIGONOMETRIC,
    DegreeCapError,
    Interval,
    RationalPoly,
    _check_basis,
    basis_eval_unchecked,
    legendre_poly,
    poly_integrate_from,
)

#: Default cap on the number of table entries (p+1)^k.
ENTRY_BUDGET = 200_000

_QUAD_CHUNK = 1 << 22


def _check_weights(k: int, weights: Sequence[int]) -> tuple[int, ...]:
    w = tuple(int(x) for x in weights)
    if len(w) != k:
        raise ValueError(f"weights must have length k={k}, got {len(w)}")
    if any(x < 0 for x in w):
        raise ValueError(f"weight exponents must be >= 0, got {w}")
    return w


def _weight_poly(exponent: int) -> RationalPoly:
    """The reduced weight (-(x+1))^exponent on [-1, 1]."""
    out = RationalPoly([1])
    for _ in range(exponent):
        out = out * RationalPoly([-1, -1])
    return out


def simplex_coeff_exact(
    k: int,
    weights: Sequence[int],
    j: Sequence[int],
    degree_cap: int = DEGREE_CAP,
) -> Fraction:
    """Reduced Fourier coefficient cbar as an exact rational.

    Args:
        k: multiplicity (number of nested integrals), k >= 1.
        weights: exponents (l_1, ..., l_k), innermost first.
        j: basis indices (j_1, ..., j_k), innermost first.
        degree_cap: bound on intermediate polynomial degree.

    Returns:
        cbar of the nested Legendre integral over -1 < x_1 < ... < x_k < 1.

    Raises:
        DegreeCapError: if an intermediate polynomial would exceed the cap.
    """
    if k < 1:
        raise ValueError(f"multiplicity must be >= 1, got {k}")
    w = _check_weights(k, weights)
    jj = tuple(int(x) for x in j)
    if len(jj) != k:
        raise ValueError(f"multi-index must have length k={k}, got {len(jj)}")
    acc = RationalPoly([1])
    for level in range(k):
        integrand = legendre_poly(jj[level], degree_cap) * _weight_poly(w[level]) * acc
        if integrand.degree > degree_cap:
            raise DegreeCapError(
                f"intermediate degree {integrand.degree} exceeds cap {degree_cap}"
            )
        acc = poly_integrate_from(integrand, -1)
    return acc.eval(Fraction(1))


def scale_coeff(
    cbar: Fraction,
    j: Sequence[int],
    weights: Sequence[int],
    iv: Interval,
) -> float:
    """Scale a reduced coefficient to the interval [t, T].

    Applies c = prod sqrt(2 j_l + 1) * (T-t)^(k/2 + L) / 2^(k + L) * cbar
    with L the sum of the weight exponents.
    """
    k = len(j)
    w = _check_weights(k, weights)
    lam = sum(w)
    root = 1.0
    for jl in j:
        root *= 2 * jl + 1
    return (
        math.sqrt(root)
        * iv.length ** (0.5 * k + lam)
        / 2.0 ** (k + lam)
        * float(cbar)
    )


def monomial_weights(weights: Sequence[int], iv: Interval) -> list[Callable]:
    """Weight callables s -> (t - s)^l matching the exact path."""
    return [lambda s, _l=l: (iv.t - np.asarray(s, dtype=float)) ** _l for l in weights]


def _default_quad_order(basis: str, j: Sequence[int], k: int) -> int:
    # Generous for polynomials; for the trigonometric basis the node count
    # tracks the largest frequency so the nested panels resolve every
    # oscillation with spectral headroom.
    return 10 + 2 * sum(int(x) for x in j) + 4 * k


def coeff_numeric(
    psi: Sequence[Callable],
    basis: str,
    j: Sequence[int],
    iv: Interval,
    quad_order: int | None = None,
) -> float:
    """Fourier coefficient by nested Gauss-Legendre quadrature.

    The only path for the trigonometric basis at k >= 2, and the
    independent cross-check for the exact rational path.

    Args:
        psi: weight callables, innermost first; each must accept numpy
            arrays of points in [t, T] and be continuous there.
        basis: "legendre" or "trigonometric".
        j: basis indices, innermost first.
        iv: the interval.
        quad_order: nodes per nesting level; defaults to a heuristic that
            grows with the indices.

    Returns:
        The coefficient as a float.

    Raises:
        ValueError: if a weight callable produces non-finite values.
    """
    _check_basis(basis)
    k = len(j)
    if len(psi) != k:
        raise ValueError(f"psi must have length k={k}, got {len(psi)}")
    n = int(quad_order) if quad_order is not None else _default_quad_order(basis, j, k)
    if n < 2:
        raise ValueError(f"quad_order must be >= 2, got {n}")
    nodes, wts = np.polynomial.legendre.leggauss(n)

    def layer(level: int, upper: np.ndarray) -> np.ndarray:
        half = 0.5 * (upper - iv.t)
        pts = iv.t + half[..., None] * (nodes + 1.0)
        vals = basis_eval_unchecked(basis, j[level], pts, iv) * psi[level](pts)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"weight callable {level} produced non-finite values")
        if level > 0:
            vals = vals * layer(level - 1, pts)
        return (vals * wts).sum(axis=-1) * half

    if n ** k <= _QUAD_CHUNK:
        return float(layer(k - 1, np.asarray(iv.T)))
    # Split the outermost level so intermediate arrays stay bounded.
    batch = max(1, _QUAD_CHUNK // n ** (k - 1))
    half = 0.5 * (iv.T - iv.t)
    pts = iv.t + half * (nodes + 1.0)
    total = 0.0
    for start in range(0, n, batch):
        sub = pts[start:start + batch]
        vals = basis_eval_unchecked(basis, j[k - 1], sub, iv) * psi[k - 1](sub)
        if k > 1:
            vals = vals * layer(k - 2, sub)
        total += float((vals * wts[start:start + batch]).sum())
    return total * half


class CoeffEntry(NamedTuple):
    """One table entry: exact reduced coefficient (if available) and the
    scaled float coefficient on the table's interval."""

    cbar: Fraction | None
    c: float


@dataclass
class CoefficientTable:
    """Complete coefficient table over the box 0 <= j_l <= p.

    Entries are stored innermost-first under lexicographic iteration
    order.  A finished table is immutable by convention and safe to share
    across threads.
    """

    k: int
    weights: tuple[int, ...]
    basis: str
    p: int
    interval: Interval
    entries: dict[tuple[int, ...], CoeffEntry] = field(repr=False)

    @property
    def exact(self) -> bool:
        """True when every entry carries an exact rational coefficient."""
        return all(e.cbar is not None for e in self.entries.values())

    def coefficient(self, j: Sequence[int]) -> float:
        return self.entries[tuple(j)].c

    def parseval_sum(self) -> float:
        """Sum of squared scaled coefficients over the whole table."""
        return math.fsum(e.c ** 2 for e in self.entries.values())

    def parseval_partial(self, p: int) -> float:
        """Sum of c^2 over the sub-box with all indices <= p."""
        return math.fsum(
            e.c ** 2 for j, e in self.entries.items() if max(j) <= p
        )

    def to_json_dict(self) -> dict:
        entries = []
        for j, e in self.entries.items():
            num = str(e.cbar.numerator) if e.cbar is not None else None
            den = str(e.cbar.denominator) if e.cbar is not None else None
            entries.append({"j": list(j), "num": num, "den": den, "c": e.c})
        return {
            "k": self.k,
            "weights": list(self.weights),
            "basis": self.basis,
            "p": self.p,
            "t": self.interval.t,
            "T": self.interval.T,
            "entries": entries,
        }

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoefficientTable":
        entries = {}
        for rec in d["entries"]:
            j = tuple(int(x) for x in rec["j"])
            cbar = None
            if rec["num"] is not None:
                cbar = Fraction(int(rec["num"]), int(rec["den"]))
            entries[j] = CoeffEntry(cbar, float(rec["c"]))
        return cls(
            k=int(d["k"]),
            weights=tuple(int(x) for x in d["weights"]),
            basis=d["basis"],
            p=int(d["p"]),
            interval=Interval(float(d["t"]), float(d["T"])),
            entries=entries,
        )

    @classmethod
    def load_json(cls, path) -> "CoefficientTable":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))

    def save_csv(self, path) -> None:
        """CSV export: columns j_1 .. j_k, num, den, c (17 significant
        digits on c so doubles round-trip)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [f"j_{l + 1}" for l in range(self.k)] + ["num", "den", "c"]
            )
            for j, e in self.entries.items():
                num = str(e.cbar.numerator) if e.cbar is not None else ""
                den = str(e.cbar.denominator) if e.cbar is not None else ""
                writer.writerow([*j, num, den, f"{e.c:.17g}"])


def coeff_table(
    k: int,
    weights: Sequence[int],
    basis: str,
    p: int,
    iv: Interval,
    mode: str = "auto",
    quad_order: int | None = None,
    max_entries: int = ENTRY_BUDGET,
    degree_cap: int = DEGREE_CAP,
) -> CoefficientTable:
    """Build the complete coefficient table over the box (p+1)^k.

    Args:
        k: multiplicity.
        weights: monomial weight exponents, innermost first.
        basis: "legendre" or "trigonometric".
        p: truncation order (largest basis index per layer).
        iv: the interval.
        mode: "exact", "numeric", or "auto" (exact for the Legendre
            basis, numeric otherwise).
        quad_order: numeric-mode nodes per level.
        max_entries: memory budget on (p+1)^k.
        degree_cap: exact-mode polynomial degree bound.

    Raises:
        ValueError: if the budget is exceeded, or exact mode is requested
            for the trigonometric basis.
    """
    _check_basis(basis)
    w = _check_weights(k, weights)
    if p < 0:
        raise ValueError(f"truncation order must be >= 0, got {p}")
    size = (p + 1) ** k
    if size > max_entries:
        raise ValueError(
            f"table size (p+1)^k = {size} exceeds the entry budget {max_entries}"
        )
    if mode == "auto":
        mode = "exact" if basis == LEGENDRE else "numeric"
    if mode not in ("exact", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and basis == TRIGONOMETRIC:
        raise ValueError("exact mode supports only the Legendre basis")

    entries: dict[tuple[int, ...], CoeffEntry] = {}
    if mode == "exact":
        # Depth-first sharing of inner antiderivatives: the inner block for
        # a prefix (j_1 .. j_l) is computed once for all (p+1)^(k-l)
        # completions.
        legs = [legendre_poly(jj, degree_cap) for jj in range(p + 1)]
        wpolys = [_weight_poly(l) for l in w]

        def walk(level: int, prefix: tuple[int, ...], inner: RationalPoly) -> None:
            base = wpolys[level] * inner
            for jl in range(p + 1):
                integrand = legs[jl] * base
                if integrand.degree > degree_cap:
                    raise DegreeCapError(
                        f"intermediate degree {integrand.degree} exceeds cap "
                        f"{degree_cap}"
                    )
                acc = poly_integrate_from(integrand, -1)
                if level == k - 1:
                    cbar = acc.eval(Fraction(1))
                    entries[prefix + (jl,)] = CoeffEntry(
                        cbar, scale_coeff(cbar, prefix + (jl,), w, iv)
                    )
                else:
                    walk(level + 1, prefix + (jl,), acc)

        walk(0, (), RationalPoly([1]))
        # Reorder to lexicographic over j for deterministic serialization.
        entries = {j: entries[j] for j in product(range(p + 1), repeat=k)}
    else:
        psi = monomial_weights(w, iv)
        for j in product(range(p + 1), repeat=k):
            c = coeff_numeric(psi, basis, j, iv, quad_order)
            entries[j] = CoeffEntry(None, c)

    return CoefficientTable(
        k=k, weights=w, basis=basis, p=p, interval=iv, entries=entries
    )
