from __future__ import annotations

import json
import math

import pytest

from stochint.cli import main
from stochint.errors import closed_form_mse
from stochint.expansions import DrawSet, catalog, evaluate
from stochint.mc import _normal_rows, _ZETA_SALT
from stochint.orthopoly import Interval


def run(capsys, *argv):
    rc = main(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


# ---------------------------------------------------------------------------
# coeffs


def test_coeffs_json_stdout(capsys):
    rc, out, err = run(capsys, "coeffs", "-k", "3", "-p", "6")
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["entries"]) == 343
    hit = [e for e in doc["entries"] if e["j"] == [1, 0, 3]]
    assert hit and hit[0]["num"] == "2" and hit[0]["den"] == "105"
    assert "entries=343" in err and "parseval=" in err and "norm=" in err


def test_coeffs_single_entry(capsys):
    rc, out, err = run(capsys, "coeffs", "-k", "2", "-p", "0")
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["entries"]) == 1
    assert doc["entries"][0]["c"] == pytest.approx(0.5)


def test_coeffs_csv_stdout(capsys):
    rc, out, _ = run(capsys, "coeffs", "-k", "2", "-p", "1", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "j_1,j_2,num,den,c"
    assert len(lines) == 5


def test_coeffs_output_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    rc, out, err = run(capsys, "coeffs", "-k", "1", "-p", "2", "-o", str(path))
    assert rc == 0
    assert "entries=3" in out  # summary moves to stdout when a file is written
    doc = json.loads(path.read_text())
    assert doc["k"] == 1


def test_coeffs_budget_error(capsys):
    rc, _, err = run(capsys, "coeffs", "-k", "5", "-p", "20")
    assert rc == 2
    assert "entry budget" in err


def test_coeffs_weight_length_error(capsys):
    rc, _, err = run(capsys, "coeffs", "-k", "2", "-p", "1", "-w", "1")
    assert rc == 2
    assert "-w/--weights" in err


def test_coeffs_interval_error(capsys):
    rc, _, err = run(capsys, "coeffs", "-k", "1", "-p", "1", "-t", "2", "-T", "1")
    assert rc == 2
    assert "-t/-T" in err


# ---------------------------------------------------------------------------
# error


def test_error_json(capsys):
    rc, out, _ = run(capsys, "error", "-k", "3", "-p", "6", "--pattern", "1,2,3")
    assert rc == 0
    doc = json.loads(out)
    assert doc["exact"] == pytest.approx(0.019553857606871314, rel=1e-12)
    assert doc["pattern"] == "1/2/3"
    assert len(doc["breakdown"]["by_level"]) == 7


def test_error_csv(capsys):
    rc, out, _ = run(capsys, "error", "-k", "2", "-p", "3", "--pattern", "1,1",
                     "-w", "1,0", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("pattern,")


def test_error_sweep(capsys):
    rc, out, _ = run(capsys, "error", "-k", "2", "-p", "7", "--pattern", "1,2", "--sweep")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,exact,bound,ratio"
    assert len(lines) == 9
    last = lines[-1].split(",")
    assert int(last[0]) == 7
    assert float(last[1]) == pytest.approx(
        closed_form_mse("strat_I00_distinct", 7, Interval(0.0, 1.0)), rel=1e-12)


def test_error_pattern_flag_errors(capsys):
    rc, _, err = run(capsys, "error", "-k", "2", "-p", "2", "--pattern", "0,1")
    assert rc == 2
    assert "--pattern" in err and "nonzero" in err
    rc, _, err = run(capsys, "error", "-k", "2", "-p", "2", "--pattern", "1,x")
    assert rc == 2
    assert "--pattern" in err


# ---------------------------------------------------------------------------
# select


def test_select_prints_order_and_ratio(capsys):
    rc, out, _ = run(capsys, "select", "-k", "3", "--pattern", "1,2,3", "--eps", "0.12")
    assert rc == 0
    assert out.startswith("p=6 ratio=0.117")


def test_select_unreachable(capsys):
    rc, _, err = run(capsys, "select", "-k", "3", "--pattern", "1,2,3",
                     "--eps", "1e-9", "--p-max", "4")
    assert rc == 2
    assert "best ratio" in err


# ---------------------------------------------------------------------------
# sample


def test_sample_reproducible(capsys):
    argv = ("sample", "I_(00)", "-q", "3", "-n", "4", "--seed", "7", "--format", "csv")
    rc1, out1, _ = run(capsys, *argv)
    rc2, out2, _ = run(capsys, *argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    lines = out1.strip().splitlines()
    assert lines[0] == "I_(00)"
    assert len(lines) == 5


def test_sample_rows_match_library_evaluation(capsys):
    rc, out, _ = run(capsys, "sample", "I_(00)", "I_(10)", "-q", "2", "-n", "3",
                     "--seed", "5", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "I_(00),I_(10)"
    width = 2 * 3  # two components, indices up to q
    Z = _normal_rows(5, _ZETA_SALT, 0, 3, width)
    for r, line in enumerate(lines[1:]):
        got = [float(x) for x in line.split(",")]
        zeta = {(i, j): Z[r, j * 2 + (i - 1)] for i in (1, 2) for j in range(3)}
        draws = DrawSet(seed=5, zeta=zeta)
        for col, name in enumerate(("I_(00)", "I_(10)")):
            e = catalog(name, 2)
            assert got[col] == pytest.approx(evaluate(e, draws), rel=1e-14), (r, name)


def test_sample_hermite_identity(capsys):
    rc, out, _ = run(capsys, "sample", "I_(000)", "-q", "2", "-n", "5",
                     "--seed", "3", "--pattern", "1,1,1", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()[1:]
    Z = _normal_rows(3, _ZETA_SALT, 0, 5, 3)
    for r, line in enumerate(lines):
        z = Z[r, 0]
        assert float(line) == pytest.approx((z ** 3 - 3 * z) / 6, rel=1e-12)


def test_sample_json_shape(capsys):
    rc, out, _ = run(capsys, "sample", "I_(1)", "-q", "1", "-n", "2", "--kind",
                     "stratonovich")
    assert rc == 0
    doc = json.loads(out)
    assert doc["names"] == ["I_(1)"]
    assert doc["kind"] == "stratonovich"
    assert doc["pattern"] is None
    assert len(doc["rows"]) == 2
    assert len(doc["rows"][0]) == 1


def test_sample_argument_errors(capsys):
    rc, _, err = run(capsys, "sample", "I_(7)", "-q", "1")
    assert rc == 2
    assert "unknown catalog name" in err
    rc, _, err = run(capsys, "sample", "I_(00)", "-q", "1", "--pattern", "1")
    assert rc == 2
    assert "--pattern" in err


# ---------------------------------------------------------------------------
# verify


def test_verify_only_tables(capsys, tmp_path):
    path = tmp_path / "report.json"
    rc, out, _ = run(capsys, "verify", "--only", "tables", "-o", str(path))
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert all(line.startswith("PASS") for line in lines[:3])
    assert lines[-1] == "3/3 checks passed (quick)"
    doc = json.loads(path.read_text())
    assert doc["passed"] is True


def test_verify_unknown_category(capsys):
    rc, _, err = run(capsys, "verify", "--only", "nope")
    assert rc == 2
    assert "nope" in err


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["coeffs"])  # missing required flags
    assert exc.value.code == 2
