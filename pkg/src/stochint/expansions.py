"""Truncated expansions of iterated stochastic integrals.

An expansion realizes a k-fold nested integral as a polynomial in
independent standard Gaussians: one variate zeta_j^(i) per component i
and basis index j, with the basis-projection coefficients supplied by a
coefficient table.  The interpretation-sensitive part is the correction
structure.  A plain product sum

    sum_j C_j * zeta_{j_1}^{(i_1)} ... zeta_{j_k}^{(i_k)}

approximates the Stratonovich integral.  The Ito integral subtracts, for
every position pair (a, b) with i_a = i_b != 0 and j_a = j_b, the
partial product with those two variates removed, and adds back the
analogous double-pair products (two disjoint pairs, both matching), with
sign (-1)^(number of contracted pairs).  Up to five nesting levels that
is the complete lattice: k=2 has one pair, k=3 three, k=4 six plus three
double pairs, k=5 ten plus fifteen.

Time layers (component 0) are deterministic: the "variate" is the basis
integral int phi_j ds, which is sqrt(T-t) for j=0 and zero otherwise in
both bases here.  They never generate corrections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Sequence

from .coeffs import CoefficientTable, coeff_table
from .orthopoly import LEGENDRE, BASES, Interval, basis_integral, _check_basis

KINDS = ("ito", "stratonovich")


@dataclass(frozen=True)
class ExpansionSpec:
    """What to expand: interpretation, shape, truncation, components."""

    kind: str
    k: int
    weights: tuple[int, ...]
    basis: str
    p: int
    i_pattern: tuple[int, ...]
    interval: Interval

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 1 <= self.k <= 5:
            raise ValueError(f"multiplicity must be in [1, 5], got {self.k}")
        object.__setattr__(self, "weights", tuple(int(x) for x in self.weights))
        object.__setattr__(self, "i_pattern", tuple(int(x) for x in self.i_pattern))
        if len(self.weights) != self.k:
            raise ValueError(f"weights must have length k={self.k}")
        if any(w < 0 for w in self.weights):
            raise ValueError(f"weight exponents must be >= 0, got {self.weights}")
        if len(self.i_pattern) != self.k:
            raise ValueError(f"i_pattern must have length k={self.k}")
        if any(i < 0 for i in self.i_pattern):
            raise ValueError(f"component labels must be >= 0, got {self.i_pattern}")
        _check_basis(self.basis)
        if self.p < 0:
            raise ValueError(f"truncation order must be >= 0, got {self.p}")


class Correction(NamedTuple):
    """One signed contraction term: sign times the product of the
    variates at the kept positions (pairs lists what was contracted)."""

    sign: int
    pairs: tuple[tuple[int, int], ...]
    keep: tuple[int, ...]


class Term(NamedTuple):
    """One multi-index term: c * (prod of variates + corrections)."""

    j: tuple[int, ...]
    c: float
    corrections: tuple[Correction, ...]


@dataclass(frozen=True)
class DrawSet:
    """One realization of the Gaussian variates.

    zeta maps (component i >= 1, basis index j) to the variate; tail, when
    present, maps each component to its two trigonometric
    tail-compensation variates (xi, mu).
    """

    seed: int
    zeta: dict[tuple[int, int], float]
    tail: dict[int, tuple[float, float]] | None = None


@dataclass(frozen=True)
class Expansion:
    """A built expansion: spec, term list, and a deterministic constant.

    Stratonovich terms carry no corrections.  The constant holds the
    interpretation offset for catalog conversions (zero otherwise).
    closed_form tags expansions whose value admits a Hermite shortcut.
    """

    spec: ExpansionSpec
    terms: tuple[Term, ...]
    constant: float = 0.0
    closed_form: str | None = field(default=None, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.spec.kind,
            "k": self.spec.k,
            "weights": list(self.spec.weights),
            "basis": self.spec.basis,
            "p": self.spec.p,
            "i_pattern": list(self.spec.i_pattern),
            "t": self.spec.interval.t,
            "T": self.spec.interval.T,
            "constant": self.constant,
            "closed_form": self.closed_form,
            "terms": [
                {
                    "j": list(t.j),
                    "c": t.c,
                    "corrections": [
                        {"sign": c.sign, "pairs": [list(p) for p in c.pairs],
                         "keep": list(c.keep)}
                        for c in t.corrections
                    ],
                }
                for t in self.terms
            ],
        }


def _position_pairs(k: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(k) for b in range(a + 1, k)]


def _disjoint_pair_pairs(k: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    pairs = _position_pairs(k)
    out = []
    for n, p1 in enumerate(pairs):
        for p2 in pairs[n + 1:]:
            if not set(p1) & set(p2):
                out.append((p1, p2))
    return out


def _check_table(spec: ExpansionSpec, table: CoefficientTable) -> None:
    if table.k != spec.k:
        raise ValueError(f"table k={table.k} does not match spec k={spec.k}")
    if table.weights != spec.weights:
        raise ValueError(
            f"table weights {table.weights} do not match spec weights {spec.weights}"
        )
    if table.basis != spec.basis:
        raise ValueError(f"table basis {table.basis!r} does not match {spec.basis!r}")
    if table.p < spec.p:
        raise ValueError(f"table truncation {table.p} is below spec truncation {spec.p}")
    if table.interval != spec.interval:
        raise ValueError("table interval does not match spec interval")


def build_ito(spec: ExpansionSpec, table: CoefficientTable) -> Expansion:
    """Assemble the Ito expansion with its full correction lattice.

    Indicators are evaluated from spec.i_pattern at build time, so only
    active corrections are materialized.
    """
    if spec.kind != "ito":
        raise ValueError(f"build_ito requires kind='ito', got {spec.kind!r}")
    _check_table(spec, table)
    k = spec.k
    ipat = spec.i_pattern
    live_pairs = [
        (a, b) for (a, b) in _position_pairs(k) if ipat[a] == ipat[b] != 0
    ]
    live_doubles = [
        (p1, p2)
        for (p1, p2) in _disjoint_pair_pairs(k)
        if ipat[p1[0]] == ipat[p1[1]] != 0 and ipat[p2[0]] == ipat[p2[1]] != 0
    ]
    positions = set(range(k))
    terms = []
    for j in product(range(spec.p + 1), repeat=k):
        corrs = []
        for (a, b) in live_pairs:
            if j[a] == j[b]:
                keep = tuple(sorted(positions - {a, b}))
                corrs.append(Correction(-1, ((a, b),), keep))
        for (p1, p2) in live_doubles:
            if j[p1[0]] == j[p1[1]] and j[p2[0]] == j[p2[1]]:
                keep = tuple(sorted(positions - set(p1) - set(p2)))
                corrs.append(Correction(+1, (p1, p2), keep))
        terms.append(Term(j, table.entries[j].c, tuple(corrs)))
    return Expansion(spec, tuple(terms), closed_form=_hermite_tag(spec))


def build_strat(spec: ExpansionSpec, table: CoefficientTable) -> Expansion:
    """Assemble the Stratonovich expansion (plain product sum).

    Scope: any weights for k <= 2; for k=3 nonunit weights require all
    components nonzero; k=4 and k=5 require unit weights.
    """
    if spec.kind != "stratonovich":
        raise ValueError(
            f"build_strat requires kind='stratonovich', got {spec.kind!r}"
        )
    _check_table(spec, table)
    weighted = any(w > 0 for w in spec.weights)
    if weighted and spec.k > 3:
        raise ValueError(
            "Stratonovich assembly with nonunit weights is available for k <= 3 only"
        )
    if weighted and spec.k == 3 and any(i == 0 for i in spec.i_pattern):
        raise ValueError(
            "Stratonovich assembly at k=3 with nonunit weights requires all "
            "components nonzero"
        )
    terms = tuple(
        Term(j, table.entries[j].c, ())
        for j in product(range(spec.p + 1), repeat=spec.k)
    )
    return Expansion(spec, terms)


def _hermite_tag(spec: ExpansionSpec) -> str | None:
    if (
        all(w == 0 for w in spec.weights)
        and spec.i_pattern[0] != 0
        and len(set(spec.i_pattern)) == 1
    ):
        return f"hermite_k{spec.k}"
    return None


def hermite_closed_form(k: int, delta: float, Delta: float, scale: float = 1.0) -> float:
    """Closed form of the k-fold Ito integral with one component, unit
    weights: a Hermite polynomial in the increment delta over [t, T] with
    variance Delta.  scale multiplies the result.
    """
    if not 1 <= k <= 5:
        raise ValueError(f"multiplicity must be in [1, 5], got {k}")
    if Delta < 0:
        raise ValueError(f"Delta must be >= 0, got {Delta}")
    d = delta
    if k == 1:
        out = d
    elif k == 2:
        out = (d ** 2 - Delta) / 2
    elif k == 3:
        out = (d ** 3 - 3 * d * Delta) / 6
    elif k == 4:
        out = (d ** 4 - 6 * d ** 2 * Delta + 3 * Delta ** 2) / 24
    else:
        out = (d ** 5 - 10 * d ** 3 * Delta + 15 * d * Delta ** 2) / 120
    return scale * out


#: Catalog names, keyed to their weight exponent vectors (digits are the
#: exponents, innermost layer first).
CATALOG_WEIGHTS = {
    "I_(0)": (0,),
    "I_(1)": (1,),
    "I_(2)": (2,),
    "I_(3)": (3,),
    "I_(00)": (0, 0),
    "I_(01)": (0, 1),
    "I_(10)": (1, 0),
    "I_(02)": (0, 2),
    "I_(20)": (2, 0),
    "I_(11)": (1, 1),
    "I_(000)": (0, 0, 0),
    "I_(001)": (0, 0, 1),
    "I_(010)": (0, 1, 0),
    "I_(100)": (1, 0, 0),
    "I_(0000)": (0, 0, 0, 0),
    "I_(00000)": (0, 0, 0, 0, 0),
}


def _interpretation_offset(weights: tuple[int, int], i_pattern: tuple[int, int],
                           iv: Interval) -> float:
    # Ito = Stratonovich - 1/2 * 1_{i_1=i_2!=0} * int_t^T psi_1 psi_2 ds,
    # and the integral of (t-s)^L over [t, T] is (-1)^L (T-t)^(L+1)/(L+1).
    if i_pattern[0] != i_pattern[1] or i_pattern[0] == 0:
        return 0.0
    lam = sum(weights)
    return -0.5 * (-1.0) ** lam * iv.length ** (lam + 1) / (lam + 1)


def catalog(
    name: str,
    q: int,
    i_pattern: Sequence[int] | None = None,
    iv: Interval = Interval(0.0, 1.0),
    kind: str = "ito",
    basis: str = LEGENDRE,
) -> Expansion:
    """Build a named low-order expansion through the generic machinery.

    Names follow the weight digits, innermost first: I_(10) nests an
    inner time-weighted layer under a plain one.  The Ito and
    Stratonovich variants of the two-layer names differ by a
    deterministic constant (the interpretation offset), active only when
    the two components coincide; for one layer they coincide, and from
    three layers up the Ito variant carries the correction lattice.

    Args:
        name: one of CATALOG_WEIGHTS.
        q: truncation order.
        i_pattern: component labels, default (1, ..., k).
        iv: the interval, default [0, 1].
        kind: "ito" or "stratonovich".
        basis: "legendre" (default) or "trigonometric".
    """
    if name not in CATALOG_WEIGHTS:
        raise ValueError(
            f"unknown catalog name {name!r}; expected one of "
            f"{', '.join(CATALOG_WEIGHTS)}"
        )
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    weights = CATALOG_WEIGHTS[name]
    k = len(weights)
    if i_pattern is None:
        i_pattern = tuple(range(1, k + 1))
    spec = ExpansionSpec(
        kind=kind, k=k, weights=weights, basis=basis, p=q,
        i_pattern=tuple(int(i) for i in i_pattern), interval=iv,
    )
    table = coeff_table(k, weights, basis, q, iv)
    if kind == "stratonovich":
        return build_strat(spec, table)
    if k == 2:
        # Two-layer Ito variants are the Stratonovich series plus the
        # exact interpretation offset, which keeps the conversion
        # identity deterministic at every truncation.
        strat_spec = ExpansionSpec(
            kind="stratonovich", k=k, weights=weights, basis=basis, p=q,
            i_pattern=spec.i_pattern, interval=iv,
        )
        strat = build_strat(strat_spec, table)
        return Expansion(
            spec, strat.terms,
            constant=_interpretation_offset(weights, spec.i_pattern, iv),
            closed_form=_hermite_tag(spec),
        )
    return build_ito(spec, table)


def _variate(draws: DrawSet, i: int, j: int, basis: str, iv: Interval) -> float:
    if i == 0:
        return basis_integral(basis, j, iv)
    try:
        return draws.zeta[(i, j)]
    except KeyError:
        raise ValueError(
            f"draw set is missing variate (i={i}, j={j}); "
            f"regenerate with a larger max_j or more components"
        ) from None


def evaluate(e: Expansion, draws: DrawSet) -> float:
    """Numeric realization of an expansion on one draw set."""
    iv = e.spec.interval
    basis = e.spec.basis
    ipat = e.spec.i_pattern
    parts = [e.constant]
    for term in e.terms:
        if term.c == 0.0:
            continue
        val = 1.0
        for i, j in zip(ipat, term.j):
            val *= _variate(draws, i, j, basis, iv)
        for corr in term.corrections:
            cv = float(corr.sign)
            for pos in corr.keep:
                cv *= _variate(draws, ipat[pos], term.j[pos], basis, iv)
            val += cv
        parts.append(term.c * val)
    return math.fsum(parts)


def alpha_q(q: int) -> float:
    """Trigonometric sine-tail constant pi^2/6 - sum_{r<=q} 1/r^2."""
    if q < 0:
        raise ValueError(f"truncation order must be >= 0, got {q}")
    return math.pi ** 2 / 6 - math.fsum(1.0 / r ** 2 for r in range(1, q + 1))


def beta_q(q: int) -> float:
    """Trigonometric cosine-tail constant pi^4/90 - sum_{r<=q} 1/r^4."""
    if q < 0:
        raise ValueError(f"truncation order must be >= 0, got {q}")
    return math.pi ** 4 / 90 - math.fsum(1.0 / r ** 4 for r in range(1, q + 1))


#: Names accepted by trig_milstein.
TRIG_NAMES = ("I_(1)", "I_(2)", "I*_(10)")


def _tail(draws: DrawSet, i: int) -> tuple[float, float]:
    if draws.tail is None or i not in draws.tail:
        raise ValueError(
            f"draw set is missing tail variates for component {i}; "
            f"regenerate with tail_q set"
        )
    return draws.tail[i]


def _trig_zeta(draws: DrawSet, i: int, j: int) -> float:
    try:
        return draws.zeta[(i, j)]
    except KeyError:
        raise ValueError(
            f"draw set is missing variate (i={i}, j={j}) for the "
            f"trigonometric expansion"
        ) from None


def trig_milstein(name: str, q: int, draws: DrawSet, iv: Interval) -> float:
    """Tail-compensated trigonometric expansions of three integrals.

    The truncated sine/cosine series are augmented with sqrt(alpha_q)*xi
    and sqrt(beta_q)*mu terms that restore the exact variance of the
    dropped tail.  Components are fixed: 1 for the single integrals,
    (1, 2) for the two-layer one.

    Args:
        name: one of TRIG_NAMES.
        q: number of retained frequencies, q >= 0.
        draws: must carry tail variates for each component used.
        iv: the interval.
    """
    if name not in TRIG_NAMES:
        raise ValueError(f"unknown name {name!r}; expected one of {TRIG_NAMES}")
    if q < 0:
        raise ValueError(f"truncation order must be >= 0, got {q}")
    d = iv.length
    pi = math.pi
    ra = math.sqrt(alpha_q(q))
    if name == "I_(1)":
        xi, _ = _tail(draws, 1)
        z = lambda j: _trig_zeta(draws, 1, j)
        series = math.fsum(z(2 * r - 1) / r for r in range(1, q + 1)) + ra * xi
        return -(d ** 1.5) / 2 * (z(0) - math.sqrt(2.0) / pi * series)
    rb = math.sqrt(beta_q(q))
    if name == "I_(2)":
        xi, mu = _tail(draws, 1)
        z = lambda j: _trig_zeta(draws, 1, j)
        cos_part = math.fsum(z(2 * r) / r ** 2 for r in range(1, q + 1)) + rb * mu
        sin_part = math.fsum(z(2 * r - 1) / r for r in range(1, q + 1)) + ra * xi
        return d ** 2.5 * (
            z(0) / 3
            + cos_part / (math.sqrt(2.0) * pi ** 2)
            - sin_part / (math.sqrt(2.0) * pi)
        )
    # I*_(10): inner time weight, components (1, 2).
    xi2, mu2 = _tail(draws, 2)
    _, mu1 = _tail(draws, 1)
    z1 = lambda j: _trig_zeta(draws, 1, j)
    z2 = lambda j: _trig_zeta(draws, 2, j)
    rt2 = math.sqrt(2.0)
    parts = [
        z1(0) * z2(0) / 6,
        -ra * xi2 * z1(0) / (2 * rt2 * pi),
        rb * (mu2 * z1(0) - 2 * mu1 * z2(0)) / (2 * rt2 * pi ** 2),
    ]
    for r in range(1, q + 1):
        parts.append(
            (
                -z2(2 * r - 1) * z1(0) / (pi * r)
                + (z2(2 * r) * z1(0) - 2 * z1(2 * r) * z2(0)) / (pi * r) ** 2
            )
            / (2 * rt2)
        )
        parts.append(
            (z1(2 * r) * z2(2 * r - 1) - z1(2 * r - 1) * z2(2 * r)) / (4 * pi * r)
        )
        parts.append(
            (3 * z1(2 * r - 1) * z2(2 * r - 1) + z2(2 * r) * z1(2 * r))
            / (8 * (pi * r) ** 2)
        )
    for r in range(1, q + 1):
        for l in range(1, q + 1):
            if l == r:
                continue
            parts.append(
                -(
                    z1(2 * r) * z2(2 * l)
                    + l * z1(2 * r - 1) * z2(2 * l - 1) / r
                )
                / (2 * pi ** 2 * (r * r - l * l))
            )
    return -(d ** 2) * math.fsum(parts)
