"""Mean-square truncation errors for nested stochastic integral expansions.

For a k-fold nested integral with kernel K (the weighted ordered-simplex
kernel of `coeffs`), the squared L2 norm I_k = int K^2 bounds the
mean-square error of any truncated expansion.  When the components
attached to the k integration layers are all nonzero, the error of the
box truncation at order p has the exact value

    E = I_k - sum_{j in box} C_j * sum_sigma C_{sigma(j)},

where sigma runs over position permutations that permute only within
equality classes of the component pattern, and (sigma(j))_a = j_{sigma(a)}.
For pairwise distinct components the inner sum collapses to C_j and the
error is the plain Parseval defect I_k - sum C^2.

All quantities are carried as (rational, power of (T-t)) pairs whenever
the coefficient table is exact, so the reported errors have no float
accumulation noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _permutations
from typing import Sequence

from .coeffs import CoefficientTable, _check_weights
from .orthopoly import Interval, RationalPoly, poly_integrate_from


@dataclass(frozen=True)
class ExactValue:
    """A value of the form coeff * (T-t)^power with rational coeff."""

    coeff: Fraction
    power: int
    interval: Interval

    @property
    def value(self) -> float:
        return float(self.coeff) * self.interval.length ** self.power

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class IndexPattern:
    """Equality structure of the component labels (i_1, ..., i_k).

    Only the partition of positions into equal-label classes matters, not
    the labels themselves.  Positions are 0-based internally; classes are
    stored sorted, ordered by smallest member.
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        positions = sorted(pos for g in self.groups for pos in g)
        if positions != list(range(len(positions))) or not positions:
            raise ValueError(f"groups must partition positions 0..k-1, got {self.groups}")
        canon = tuple(sorted((tuple(sorted(g)) for g in self.groups), key=lambda g: g[0]))
        object.__setattr__(self, "groups", canon)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "IndexPattern":
        """Build from component labels, e.g. (1, 1, 2) -> classes {0,1},{2}.

        Labels are symbolic equivalence-class markers.  The zero label is
        rejected: a time layer carries no randomness to correlate, and the
        exact error formula is stated for nonzero components only.
        """
        labs = [str(x) for x in labels]
        if not labs:
            raise ValueError("pattern must be nonempty")
        if any(x == "0" for x in labs):
            raise ValueError("pattern labels must be nonzero (time layers are excluded)")
        seen: dict[str, list[int]] = {}
        for pos, lab in enumerate(labs):
            seen.setdefault(lab, []).append(pos)
        return cls(tuple(tuple(g) for g in seen.values()))

    @property
    def k(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def distinct(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    def position_permutations(self) -> list[tuple[int, ...]]:
        """All maps sigma with sigma(class) = class, as source-position tuples."""
        sigmas = [list(range(self.k))]
        for g in self.groups:
            if len(g) == 1:
                continue
            new = []
            for sigma in sigmas:
                for perm in _permutations(g):
                    cand = sigma.copy()
                    for pos, src in zip(g, perm):
                        cand[pos] = src
                    new.append(cand)
            sigmas = new
        return [tuple(s) for s in sigmas]

    def __str__(self) -> str:
        return "/".join(",".join(str(p + 1) for p in g) for g in self.groups)


@dataclass(frozen=True)
class ErrorReport:
    """Exact truncation error with its companion quantities.

    Fields `exact`, `bound`, `norm` are floats on the table's interval;
    `exact_value`/`norm_value` carry the rational forms when available.
    `breakdown` holds the Parseval-diagonal and permutation-cross parts of
    the captured energy plus the exact error at every level up to p.
    """

    exact: float
    bound: float
    norm: float
    p: int
    pattern: IndexPattern
    exact_value: ExactValue | None
    norm_value: ExactValue | None
    breakdown: dict

    @property
    def ratio(self) -> float:
        return self.exact / self.norm

    def to_json_dict(self) -> dict:
        d = {
            "exact": self.exact,
            "bound": self.bound,
            "norm": self.norm,
            "ratio": self.ratio,
            "p": self.p,
            "pattern": str(self.pattern),
            "breakdown": dict(self.breakdown),
        }
        if self.exact_value is not None:
            d["exact_rational"] = {
                "num": str(self.exact_value.coeff.numerator),
                "den": str(self.exact_value.coeff.denominator),
                "power": self.exact_value.power,
            }
        return d


def norm_squared(k: int, weights: Sequence[int], iv: Interval) -> ExactValue:
    """Squared L2 norm I_k of the weighted simplex kernel, exactly.

    Equals the iterated integral of prod (t-s_l)^{2 l_l} over the ordered
    region, a rational multiple of (T-t)^(k + 2L).  For unit weights this
    is (T-t)^k / k!.
    """
    w = _check_weights(k, weights)
    acc = RationalPoly([1])
    for l in w:
        mono = RationalPoly([0] * (2 * l) + [1])
        acc = poly_integrate_from(acc * mono, 0)
    return ExactValue(acc.eval(Fraction(1)), k + 2 * sum(w), iv)


def _box(p: int, k: int):
    from itertools import product

    return product(range(p + 1), repeat=k)


def exact_mse(table: CoefficientTable, pattern: IndexPattern, p: int) -> ErrorReport:
    """Exact mean-square error of the box truncation at order p.

    Args:
        table: complete coefficient table with table.p >= p.
        pattern: equality structure of the (nonzero) component labels.
        p: truncation order.

    Returns:
        ErrorReport with the exact error, the factorial upper bound at the
        same level, and the kernel norm.

    Raises:
        ValueError: pattern size differs from table.k, or p exceeds the
            table.
    """
    k = table.k
    if pattern.k != k:
        raise ValueError(f"pattern has {pattern.k} positions but the table has k={k}")
    if not 0 <= p <= table.p:
        raise ValueError(f"truncation order {p} outside the table range [0, {table.p}]")

    lam = sum(table.weights)
    power = k + 2 * lam
    iv = table.interval
    norm = norm_squared(k, table.weights, iv)
    sigmas = pattern.position_permutations()
    exact_path = table.exact

    # Captured energy, split by the largest index so one pass yields the
    # error at every level <= p; diagonal = identity permutation part.
    diag_lvl: list = [Fraction(0) if exact_path else 0.0 for _ in range(p + 1)]
    cross_lvl = [Fraction(0) if exact_path else 0.0 for _ in range(p + 1)]
    for j in _box(p, k):
        lvl = max(j)
        if exact_path:
            cbar = table.entries[j].cbar
            if not cbar:
                continue
            pref = Fraction(math.prod(2 * jl + 1 for jl in j), 4 ** (k + lam))
            diag_lvl[lvl] += pref * cbar * cbar
            cross = Fraction(0)
            for sigma in sigmas[1:]:
                cross += table.entries[tuple(j[s] for s in sigma)].cbar
            cross_lvl[lvl] += pref * cbar * cross
        else:
            c = table.entries[j].c
            if not c:
                continue
            diag_lvl[lvl] += c * c
            cross_lvl[lvl] += c * math.fsum(
                table.entries[tuple(j[s] for s in sigma)].c for sigma in sigmas[1:]
            )

    if exact_path:
        scale = iv.length ** power
        err = norm.coeff
        by_level = []
        diag_total = Fraction(0)
        for lvl in range(p + 1):
            err -= diag_lvl[lvl] + cross_lvl[lvl]
            diag_total += diag_lvl[lvl]
            by_level.append(float(err) * scale)
        exact_value = ExactValue(err, power, iv)
        exact_f = exact_value.value
        bound = math.factorial(k) * float(norm.coeff - diag_total) * scale
        breakdown = {
            "diagonal": float(diag_total) * scale,
            "cross": float(sum(cross_lvl)) * scale,
            "by_level": by_level,
        }
    else:
        norm_f = norm.value
        err = norm_f
        by_level = []
        diag_total = 0.0
        for lvl in range(p + 1):
            err -= diag_lvl[lvl] + cross_lvl[lvl]
            diag_total += diag_lvl[lvl]
            by_level.append(err)
        exact_value = None
        exact_f = err
        bound = math.factorial(k) * (norm_f - diag_total)
        breakdown = {
            "diagonal": diag_total,
            "cross": math.fsum(cross_lvl),
            "by_level": by_level,
        }

    return ErrorReport(
        exact=exact_f,
        bound=bound,
        norm=norm.value,
        p=p,
        pattern=pattern,
        exact_value=exact_value,
        norm_value=norm,
        breakdown=breakdown,
    )


def _p_vector(p_vector, k: int) -> tuple[int, ...]:
    if isinstance(p_vector, int):
        return (p_vector,) * k
    pv = tuple(int(x) for x in p_vector)
    if len(pv) != k:
        raise ValueError(f"p_vector must have length k={k}, got {len(pv)}")
    return pv


def mse_upper_bound(table: CoefficientTable, p_vector) -> float:
    """Factorial upper bound k! * (I_k - sum_{j <= p_vector} C_j^2).

    Valid for any component pattern, including time layers; p_vector may
    be a single order or one order per position.
    """
    pv = _p_vector(p_vector, table.k)
    if any(not 0 <= p <= table.p for p in pv):
        raise ValueError(f"p_vector {pv} outside the table range [0, {table.p}]")
    lam = sum(table.weights)
    norm = norm_squared(table.k, table.weights, table.interval)
    if table.exact:
        defect = norm.coeff
        pref = Fraction(1, 4 ** (table.k + lam))
        for j, e in table.entries.items():
            if all(jl <= p for jl, p in zip(j, pv)):
                defect -= pref * math.prod(2 * jl + 1 for jl in j) * e.cbar ** 2
        return math.factorial(table.k) * float(defect) * table.interval.length ** norm.power
    captured = math.fsum(
        e.c ** 2
        for j, e in table.entries.items()
        if all(jl <= p for jl, p in zip(j, pv))
    )
    return math.factorial(table.k) * (norm.value - captured)


def moment_bound(n: int, table: CoefficientTable, p_vector) -> float:
    """Order-2n moment bound C_{n,k} * (I_k - sum C^2)^n.

    C_{n,k} = (k!)^(2n) * (n(2n-1))^(n(k-1)) * (2n-1)!!.  At n=1 the
    constant is (k!)^2, which exceeds the k! of the mean-square bound;
    both are reported as given, without reconciliation.
    """
    if n < 1:
        raise ValueError(f"moment order must be >= 1, got {n}")
    k = table.k
    defect = mse_upper_bound(table, p_vector) / math.factorial(k)
    dfact = math.prod(range(1, 2 * n, 2))
    const = math.factorial(k) ** (2 * n) * (n * (2 * n - 1)) ** (n * (k - 1)) * dfact
    return const * defect ** n


#: Names accepted by closed_form_mse.
CLOSED_FORM_NAMES = ("strat_I00_distinct", "strat_I10_distinct", "ito_I10_equal")


def closed_form_mse(name: str, q: int, iv: Interval) -> float:
    """Closed-form mean-square errors for three k=2 truncations.

    strat_I00_distinct: plain double integral, distinct components,
    first q off-diagonal pairs kept; telescopes to (T-t)^2/(4(2q+1)).
    strat_I10_distinct: inner time weight, distinct components, series
    truncation at q.  ito_I10_equal: same weight, equal components.

    Args:
        name: one of CLOSED_FORM_NAMES.
        q: truncation order, q >= 0 (q >= 1 for strat_I00_distinct).
    """
    if q < 0:
        raise ValueError(f"truncation order must be >= 0, got {q}")
    d = iv.length
    if name == "strat_I00_distinct":
        s = sum(Fraction(1, 4 * i * i - 1) for i in range(1, q + 1))
        return d ** 2 / 2 * float(Fraction(1, 2) - s)
    if name == "strat_I10_distinct":
        total = Fraction(5, 9)
        total -= 2 * sum(Fraction(1, 4 * i * i - 1) for i in range(2, q + 1))
        total -= sum(
            Fraction(1, (2 * i - 1) ** 2 * (2 * i + 3) ** 2) for i in range(1, q + 1)
        )
        total -= sum(
            Fraction((i + 2) ** 2 + (i + 1) ** 2,
                     (2 * i + 1) * (2 * i + 5) * (2 * i + 3) ** 2)
            for i in range(q + 1)
        )
        return d ** 4 / 16 * float(total)
    if name == "ito_I10_equal":
        total = Fraction(1, 9)
        total -= sum(
            Fraction(1, (2 * i + 1) * (2 * i + 5) * (2 * i + 3) ** 2)
            for i in range(q + 1)
        )
        total -= 2 * sum(
            Fraction(1, (2 * i - 1) ** 2 * (2 * i + 3) ** 2) for i in range(1, q + 1)
        )
        return d ** 4 / 16 * float(total)
    raise ValueError(f"unknown closed form {name!r}; expected one of {CLOSED_FORM_NAMES}")


class TruncationSearchError(ValueError):
    """Raised when no truncation order within p_max meets the target.

    Carries the best achieved relative error so callers can report how
    close the search came.
    """

    def __init__(self, p_max: int, best_ratio: float):
        self.p_max = p_max
        self.best_ratio = best_ratio
        super().__init__(
            f"no p <= {p_max} reaches the target; best ratio {best_ratio:.6g} at p={p_max}"
        )


def select_p(
    k: int,
    weights: Sequence[int],
    pattern: IndexPattern,
    eps_rel: float,
    iv: Interval,
    p_max: int = 8,
) -> int:
    """Smallest truncation order p with exact_mse/norm <= eps_rel.

    Builds one Legendre table at p_max and scans the per-level errors.

    Raises:
        TruncationSearchError: if even p_max misses the target.
    """
    from .coeffs import coeff_table
    from .orthopoly import LEGENDRE

    if eps_rel <= 0:
        raise ValueError(f"eps_rel must be > 0, got {eps_rel}")
    if p_max < 0:
        raise ValueError(f"p_max must be >= 0, got {p_max}")
    table = coeff_table(k, weights, LEGENDRE, p_max, iv)
    report = exact_mse(table, pattern, p_max)
    norm = report.norm
    for p, err in enumerate(report.breakdown["by_level"]):
        if err / norm <= eps_rel:
            return p
    raise TruncationSearchError(p_max, report.exact / norm)
