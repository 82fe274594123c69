from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from stochint.coeffs import (
    ENTRY_BUDGET,
    CoefficientTable,
    coeff_numeric,
    coeff_table,
    scale_coeff,
    simplex_coeff_exact,
)
from stochint.orthopoly import LEGENDRE, TRIGONOMETRIC, Interval

UNIT = Interval(0.0, 1.0)


@pytest.mark.parametrize("k,weights", [
    (1, (0,)), (1, (1,)), (1, (2,)),
    (2, (0, 0)), (2, (1, 0)), (2, (0, 1)), (2, (1, 1)),
    (3, (0, 0, 0)), (3, (1, 0, 0)), (3, (0, 0, 1)),
])
def test_simplex_coeff_against_sympy(k, weights):
    for j in itertools.product(range(3), repeat=k):
        got = simplex_coeff_exact(k, weights, j)
        want = oracles.simplex_coeff_sympy(k, weights, j)
        assert got == want, (weights, j)


def test_simplex_coeff_locked_triples():
    for (j1, j2), want in oracles.TRIPLE_J3.items():
        assert simplex_coeff_exact(3, (0, 0, 0), (j1, j2, 3)) == want


def test_simplex_coeff_locked_quadruple_and_quintuple():
    for (j1, j2), want in oracles.QUAD_J12.items():
        assert simplex_coeff_exact(4, (0, 0, 0, 0), (j1, j2, 1, 2)) == want
    for (j1, j2), want in oracles.QUINT_J101.items():
        assert simplex_coeff_exact(5, (0, 0, 0, 0, 0), (j1, j2, 1, 0, 1)) == want


def test_simplex_coeff_validates_input():
    with pytest.raises(ValueError):
        simplex_coeff_exact(2, (0,), (0, 0))
    with pytest.raises(ValueError):
        simplex_coeff_exact(2, (0, -1), (0, 0))
    with pytest.raises(ValueError):
        simplex_coeff_exact(2, (0, 0), (0, -1))


def test_scale_coeff_matches_reference_formula():
    iv = Interval(0.25, 1.75)
    for k, w, j in [(3, (0, 0, 0), (1, 0, 3)), (2, (1, 0), (2, 1)), (1, (2,), (2,))]:
        cbar = simplex_coeff_exact(k, w, j)
        got = scale_coeff(cbar, j, w, iv)
        want = oracles.scale_to_interval(cbar, j, w, iv.t, iv.T)
        assert got == pytest.approx(want, rel=1e-15)


def test_scale_coeff_triple_constant():
    # cbar for the all-zero triple index is 4/3; on the unit interval the
    # scaled coefficient is 4/3 / 8 = 1/6
    cbar = simplex_coeff_exact(3, (0, 0, 0), (0, 0, 0))
    assert cbar == Fraction(4, 3)
    assert scale_coeff(cbar, (0, 0, 0), (0, 0, 0), UNIT) == pytest.approx(1 / 6)


@pytest.mark.parametrize("iv", [UNIT, Interval(2.0, 4.5)])
def test_double_integral_structure_no_weights(iv):
    table = coeff_table(2, (0, 0), LEGENDRE, 6, iv)
    d = iv.length
    assert table.coefficient((0, 0)) == pytest.approx(d / 2)
    for j in range(1, 7):
        assert table.coefficient((j, j)) == 0.0
    for i in range(1, 7):
        v = d / (2 * math.sqrt(4 * i * i - 1))
        assert table.coefficient((i - 1, i)) == pytest.approx(+v)
        assert table.coefficient((i, i - 1)) == pytest.approx(-v)
    # everything farther off the diagonal vanishes
    for a, b in itertools.product(range(7), repeat=2):
        if abs(a - b) > 1:
            assert table.coefficient((a, b)) == 0.0


def test_double_integral_diagonal_once_weighted():
    table = coeff_table(2, (1, 0), LEGENDRE, 3, UNIT)
    assert table.coefficient((0, 0)) == pytest.approx(-1 / 6)
    assert table.coefficient((1, 1)) == pytest.approx(-1 / 20)
    assert table.coefficient((2, 2)) == pytest.approx(-1 / 84)
    # diagonal sums to -1/4 in the limit; partial sums stay above it
    partial = sum(table.coefficient((j, j)) for j in range(4))
    assert -0.25 < partial < 0.0


@pytest.mark.parametrize("k,weights", [
    (1, (0,)), (1, (1,)),
    (2, (0, 0)), (2, (0, 1)), (2, (1, 0)),
    (3, (0, 0, 0)), (3, (1, 0, 0)), (3, (0, 1, 0)), (3, (0, 0, 1)),
])
def test_numeric_matches_exact(k, weights):
    iv = Interval(0.5, 1.25)
    psi = [lambda s, _l=l: (iv.t - s) ** _l for l in weights]
    for j in itertools.product(range(4), repeat=k):
        exact = scale_coeff(simplex_coeff_exact(k, weights, j), j, weights, iv)
        numeric = coeff_numeric(psi, LEGENDRE, j, iv, quad_order=20)
        assert numeric == pytest.approx(exact, abs=2e-12), (weights, j)


def test_numeric_trig_single_integral():
    # once-weighted single integral in the trigonometric basis: constant
    # coefficient -d^{3/2}/2, odd members d^{3/2} sqrt(2)/(2 pi r), even zero
    iv = Interval(0.0, 2.0)
    d = iv.length
    psi = [lambda s: (iv.t - s)]
    assert coeff_numeric(psi, TRIGONOMETRIC, (0,), iv, quad_order=80) == pytest.approx(-d ** 1.5 / 2, rel=1e-12)
    for r in (1, 2, 3):
        got = coeff_numeric(psi, TRIGONOMETRIC, (2 * r - 1,), iv, quad_order=80)
        assert got == pytest.approx(d ** 1.5 * math.sqrt(2) / (2 * math.pi * r), rel=1e-11)
        assert coeff_numeric(psi, TRIGONOMETRIC, (2 * r,), iv, quad_order=80) == pytest.approx(0.0, abs=1e-12)


def test_numeric_rejects_non_finite_weight():
    psi = [lambda s: np.full(np.shape(s), np.nan)]
    with pytest.raises(ValueError):
        coeff_numeric(psi, LEGENDRE, (0,), UNIT, quad_order=21)


def test_permutation_sum_factorizes_for_equal_weights():
    # summing a coefficient over all permutations of its index reproduces the
    # product of single-layer integrals, which is nonzero only for the
    # all-zero index
    for k, p in [(2, 4), (3, 4)]:
        table = coeff_table(k, (0,) * k, LEGENDRE, p, UNIT)
        for j in itertools.product(range(p + 1), repeat=k):
            total = math.fsum(table.coefficient(tuple(j[s] for s in perm))
                              for perm in itertools.permutations(range(k)))
            want = 1.0 if all(x == 0 for x in j) else 0.0
            count = math.prod(range(1, k + 1))
            assert total / count == pytest.approx(want / count, abs=1e-13), (k, j)


def test_table_entries_are_lexicographic():
    table = coeff_table(2, (0, 0), LEGENDRE, 2, UNIT)
    assert list(table.entries) == sorted(itertools.product(range(3), repeat=2))


def test_table_parseval_partial_monotone():
    table = coeff_table(3, (0, 0, 0), LEGENDRE, 5, UNIT)
    vals = [table.parseval_partial(p) for p in range(6)]
    assert vals == sorted(vals)
    assert vals[-1] == pytest.approx(table.parseval_sum())
    assert vals[-1] < 1 / 6  # squared norm of the triple integral


def test_table_entry_budget():
    with pytest.raises(ValueError, match="entry budget"):
        coeff_table(5, (0,) * 5, LEGENDRE, 20, UNIT, max_entries=ENTRY_BUDGET)


def test_table_exact_mode_rejected_for_trig():
    with pytest.raises(ValueError):
        coeff_table(2, (0, 0), TRIGONOMETRIC, 2, UNIT, mode="exact")


def test_table_json_round_trip(tmp_path):
    table = coeff_table(2, (1, 0), LEGENDRE, 3, Interval(0.5, 2.0))
    path = tmp_path / "table.json"
    table.save_json(path)
    back = CoefficientTable.load_json(path)
    assert back.k == table.k
    assert back.weights == table.weights
    assert back.basis == table.basis
    assert back.p == table.p
    assert back.interval == table.interval
    assert back.entries == table.entries
    assert back.exact


def test_table_json_numeric_entries_have_no_rational(tmp_path):
    table = coeff_table(1, (1,), TRIGONOMETRIC, 2, UNIT, quad_order=60)
    d = table.to_json_dict()
    assert all(e["num"] is None and e["den"] is None for e in d["entries"])
    path = tmp_path / "trig.json"
    table.save_json(path)
    back = CoefficientTable.load_json(path)
    assert not back.exact
    assert back.entries == table.entries


def test_table_csv_format(tmp_path):
    table = coeff_table(2, (0, 0), LEGENDRE, 1, UNIT)
    path = tmp_path / "table.csv"
    table.save_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "j_1,j_2,num,den,c"
    assert len(lines) == 1 + 4
    first = lines[1].split(",")
    assert first[:2] == ["0", "0"]
    assert Fraction(int(first[2]), int(first[3])) == Fraction(2)
    assert float(first[4]) == pytest.approx(0.5)


def test_table_interval_round_trip_preserves_floats():
    iv = Interval(0.1, 0.30000000000000004)
    table = coeff_table(1, (0,), LEGENDRE, 2, iv)
    back = CoefficientTable.from_json_dict(json.loads(json.dumps(table.to_json_dict())))
    assert back.interval == iv
