from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from stochint.errors import closed_form_mse, exact_mse, IndexPattern
from stochint.coeffs import coeff_table
from stochint.expansions import ExpansionSpec, build_ito, catalog
from stochint.mc import (
    CHUNK,
    MomentEstimate,
    StreamConfig,
    _normal_rows,
    _ZETA_SALT,
    default_workers,
    draw_set,
    mc_moment,
    validate_suite,
)
from stochint.orthopoly import LEGENDRE, Interval

UNIT = Interval(0.0, 1.0)


# ---------------------------------------------------------------------------
# draw streams


def test_draw_set_is_deterministic():
    a = draw_set(42, 2, 5, tail_q=3)
    b = draw_set(42, 2, 5, tail_q=3)
    assert a == b
    c = draw_set(43, 2, 5, tail_q=3)
    assert a.zeta != c.zeta


def test_draw_set_extends_consistently():
    # larger max_j at the same component count extends the same stream
    small = draw_set(9, 2, 4)
    large = draw_set(9, 2, 9)
    for key, val in small.zeta.items():
        assert large.zeta[key] == val


def test_draw_set_tail_is_independent_of_tail_q():
    a = draw_set(7, 2, 3, tail_q=2)
    b = draw_set(7, 2, 3, tail_q=40)
    assert a.tail == b.tail
    assert set(a.tail) == {1, 2}
    assert draw_set(7, 2, 3).tail is None


def test_draw_set_matches_stream_row_zero():
    m, max_j = 3, 4
    width = m * (max_j + 1)
    Z = _normal_rows(11, _ZETA_SALT, 0, 1, width)
    d = draw_set(11, m, max_j)
    for j in range(max_j + 1):
        for i in range(1, m + 1):
            assert d.zeta[(i, j)] == Z[0, j * m + (i - 1)]


def test_stream_moments_are_standard_normal():
    n = 100_000
    Z = _normal_rows(123, _ZETA_SALT, 0, n, 2)
    for col in range(2):
        x = Z[:, col]
        assert abs(x.mean()) < 4 / math.sqrt(n)
        assert abs(x.var() - 1.0) < 4 * math.sqrt(2 / n)
    r = float(np.mean(Z[:, 0] * Z[:, 1]))
    assert abs(r) < 4 / math.sqrt(n)


def test_default_workers_env(monkeypatch):
    monkeypatch.delenv("STOCHINT_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("STOCHINT_WORKERS", "6")
    assert default_workers() == 6
    monkeypatch.setenv("STOCHINT_WORKERS", "zero")
    assert default_workers() == 1


# ---------------------------------------------------------------------------
# moment estimation


def test_mc_moment_argument_errors():
    e = catalog("I_(00)", 2)
    cfg = StreamConfig(seed=0, n_samples=10)
    with pytest.raises(ValueError):
        mc_moment(e, cfg, statistic="median")
    other = catalog("I_(00)", 2, iv=Interval(0.0, 2.0))
    with pytest.raises(ValueError, match="interval"):
        mc_moment((e, other), cfg)
    equal = catalog("I_(00)", 2, (1, 1))
    with pytest.raises(ValueError, match="pattern"):
        mc_moment((e, equal), cfg)
    with pytest.raises(ValueError):
        mc_moment((e,), cfg)
    with pytest.raises(ValueError):
        StreamConfig(seed=-1, n_samples=10)
    with pytest.raises(ValueError):
        StreamConfig(seed=0, n_samples=0)


@pytest.mark.parametrize("name,pattern,q", [
    ("I_(00)", (1, 1), 4),
    ("I_(000)", (1, 2, 3), 2),
    ("I_(000)", (1, 1, 2), 2),
    ("I_(0000)", (1, 1, 2, 2), 1),
])
def test_mc_mean_zero(name, pattern, q):
    e = catalog(name, q, pattern)
    est = mc_moment(e, StreamConfig(seed=2026, n_samples=20_000))
    assert est.n == 20_000
    assert abs(est.mean) < 3 * est.stderr, (name, pattern)


def test_mc_increment_variance_matches_exact_errors():
    # nested truncations: the increment's mean square is the error drop
    table = coeff_table(3, (0, 0, 0), LEGENDRE, 6, UNIT)
    pat = IndexPattern.from_labels(["1", "2", "3"])
    e2 = catalog("I_(000)", 2)
    e6 = catalog("I_(000)", 6)
    want = (exact_mse(table, pat, 2).exact - exact_mse(table, pat, 6).exact)
    est = mc_moment((e2, e6), StreamConfig(seed=31, n_samples=40_000),
                    statistic="second_moment")
    assert abs(est.second_moment - want) < 3 * est.stderr
    assert est.stderr < want  # the estimate is actually informative


def test_mc_equal_pair_increment_is_rounding_noise():
    # the equal-component pair is complete at order 0; the increment's
    # monomials cancel algebraically, leaving per-sample rounding residue
    e0 = catalog("I_(00)", 0, (1, 1))
    e5 = catalog("I_(00)", 5, (1, 1))
    est = mc_moment((e0, e5), StreamConfig(seed=5, n_samples=5_000),
                    statistic="second_moment")
    assert est.second_moment < 1e-28


def test_mc_second_moment_of_truncated_pair():
    q = 20
    e = catalog("I_(00)", q)
    want = 0.5 - closed_form_mse("strat_I00_distinct", q, UNIT)
    est = mc_moment(e, StreamConfig(seed=77, n_samples=50_000),
                    statistic="second_moment")
    assert abs(est.second_moment - want) < 3 * est.stderr


def test_mc_stderr_scale():
    # the single time-weighted layer is complete at q=1 with variance 1/3
    e = catalog("I_(1)", 1)
    n = 10_000
    est = mc_moment(e, StreamConfig(seed=8, n_samples=n))
    want = math.sqrt(1 / 3 / n)
    assert est.stderr == pytest.approx(want, rel=0.05)


def test_mc_worker_invariance_is_bitwise():
    e = catalog("I_(000)", 2, (1, 1, 2))
    n = CHUNK + 7  # forces an unaligned chunk grid
    one = mc_moment(e, StreamConfig(seed=13, n_samples=n, workers=1),
                    statistic="second_moment")
    three = mc_moment(e, StreamConfig(seed=13, n_samples=n, workers=3),
                      statistic="second_moment")
    assert one == three


def test_mc_rerun_is_bitwise():
    e = catalog("I_(00)", 3)
    cfg = StreamConfig(seed=99, n_samples=12_345)
    assert mc_moment(e, cfg) == mc_moment(e, cfg)


# ---------------------------------------------------------------------------
# validation suite


def test_validate_suite_quick_passes():
    report = validate_suite("quick")
    assert report["level"] == "quick"
    assert report["passed"], [c for c in report["checks"] if not c["pass"]]
    assert len(report["checks"]) >= 40
    for c in report["checks"]:
        assert set(c) >= {"check", "expected", "observed", "tolerance", "pass"}


def test_validate_suite_category_filter():
    report = validate_suite("quick", only=["tables"])
    assert report["passed"]
    assert all(c["check"].startswith("tables/") for c in report["checks"])
    assert len(report["checks"]) == 3


def test_validate_suite_rejects_unknown_category():
    with pytest.raises(ValueError):
        validate_suite("quick", only=["spectra"])
    with pytest.raises(ValueError):
        validate_suite("paranoid")


def test_validate_suite_catches_corrupted_coefficients(monkeypatch):
    import stochint.mc as mc_mod

    real = mc_mod.simplex_coeff_exact

    def corrupted(k, weights, j):
        out = real(k, weights, j)
        if k == 3 and j == (1, 0, 3):
            return out + Fraction(1, 10 ** 6)
        return out

    monkeypatch.setattr(mc_mod, "simplex_coeff_exact", corrupted)
    report = validate_suite("quick", only=["tables"])
    assert not report["passed"]
    bad = [c for c in report["checks"] if not c["pass"]]
    assert len(bad) == 1
    assert "triple" in bad[0]["check"]
