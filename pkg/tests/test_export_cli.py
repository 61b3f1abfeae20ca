import csv
import io
import json
import os
import subprocess
import sys

import mpmath
import pytest

from maxent_triangle.cli import main
from maxent_triangle.export import CSV_HEADER, DistributionExport, vector_from_csv
from maxent_triangle.triangle import iter_orbits, marginal_residual, min_entry
from maxent_triangle.verify import CHECK_NAMES, verify

from conftest import built


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# exports

@pytest.mark.parametrize("n", [1, 6, 29])
def test_json_round_trip_is_bit_exact(n):
    c = built(n)
    export = DistributionExport.from_vector(c.pi.vector, "0")
    back = DistributionExport.from_json(export.to_json())
    vec = back.to_vector()
    assert vec == c.pi.vector
    assert marginal_residual(vec, c.table) == marginal_residual(c.pi.vector, c.table)
    assert min_entry(vec) == min_entry(c.pi.vector)


@pytest.mark.parametrize("n", [2, 13])
def test_csv_round_trip_is_bit_exact(n):
    c = built(n)
    text = DistributionExport.from_vector(c.pi.vector, "0").to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert [tuple(map(int, r[:3])) for r in rows[1:]] == [o.canonical for o in iter_orbits(n)]
    assert vector_from_csv(text, 128) == c.pi.vector


def test_csv_rejects_bad_input():
    good = DistributionExport.from_vector(built(4).pi.vector, "0").to_csv()
    lines = good.splitlines()
    with pytest.raises(ValueError):
        vector_from_csv("x,y\n", 128)
    with pytest.raises(ValueError):
        vector_from_csv("\n".join(lines[:-1]), 128)
    with pytest.raises(ValueError):
        vector_from_csv("\n".join([lines[0], lines[2], lines[1]] + lines[3:]), 128)


def test_export_validation():
    export = DistributionExport.from_vector(built(5).pi.vector, "0")
    d = json.loads(export.to_json())
    d["entries"] = d["entries"][::-1]
    with pytest.raises(ValueError):
        DistributionExport.from_json(json.dumps(d))
    d = json.loads(export.to_json())
    d["schema_version"] = "2"
    with pytest.raises(ValueError):
        DistributionExport.from_json(json.dumps(d))
    with pytest.raises(ValueError):
        DistributionExport.from_vector(built(5).pi.vector, "0", normalization="raw")


# CLI

def test_rho_n1(capsys):
    code, out, _ = run(capsys, "rho", "--n", "1")
    assert code == 0 and "rho = 0.5\n" in out


def test_rho_n2_high_precision(capsys):
    code, out, _ = run(capsys, "rho", "--n", "2", "--prec", "256", "--json")
    rho = json.loads(out)["rho"]
    with mpmath.workprec(300):
        assert abs(mpmath.mpf(rho) - (mpmath.sqrt(33) - 1) / 8) < mpmath.mpf(2) ** -200
    assert rho.startswith("0.59307033")


@pytest.mark.parametrize("argv", [["rho", "--n", "0"], ["build", "--n", "-3"], ["sweep", "5", "4"],
                                  ["build", "--n", "3", "--format", "xml"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


def test_build_n1_csv(capsys):
    code, out, _ = run(capsys, "build", "--n", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["a,b,c,orbit_size,value", "0,0,1,3,0.5"]


def test_build_n4_is_beta(capsys, tmp_path):
    path = tmp_path / "pi4.json"
    assert run(capsys, "build", "--n", "4", "--out", str(path))[0] == 0
    export = DistributionExport.from_json(path.read_text())
    assert export.normalization == "scaled"
    assert export.to_vector() == built(4).beta.vector


def test_build_n30_normalized(capsys, tol):
    code, out, _ = run(capsys, "build", "--n", "30", "--normalize")
    export = DistributionExport.from_json(out)
    assert code == 0 and export.normalization == "probability"
    vec = export.to_vector()
    assert min(v for _, v in vec.items()) >= -tol
    assert abs(mpmath.fsum(mpmath.mpf(m) for m in export.marginal) - 1) <= tol
    assert abs(vec.total_mass() - 1) <= tol


def test_verify_n27(capsys):
    code, out, _ = run(capsys, "verify", "--n", "27")
    assert code == 0 and "beta_nonnegative: pass" in out


def test_verify_n28(capsys):
    code, out, _ = run(capsys, "verify", "--n", "28")
    assert code == 0
    assert "beta_nonnegative: expected-fail (informational)" in out
    assert "pi_nonnegative: pass" in out


def test_verify_n5(capsys):
    code, out, _ = run(capsys, "verify", "--n", "5")
    assert code == 0 and "pi_equals_beta: pass" in out


def test_verify_json_lists_every_check_once(capsys):
    for n in (1, 5, 12):
        code, out, _ = run(capsys, "verify", "--n", str(n), "--json")
        names = [c["name"] for c in json.loads(out)["checks"]]
        assert names == list(CHECK_NAMES)


def test_verify_failure_gives_nonzero_exit(capsys, monkeypatch):
    import dataclasses
    import maxent_triangle.cli as cli

    def broken(n, ctx=None):
        r = verify(n, ctx)
        checks = [dataclasses.replace(c, status="fail") if c.name == "pi_marginal" else c for c in r.checks]
        return dataclasses.replace(r, checks=checks)

    monkeypatch.setattr(cli, "verify", broken)
    code, out, _ = run(capsys, "verify", "--n", "12")
    assert code == 1 and "pi_marginal: fail" in out and "FAILED" in out


def test_precision_failure_exit_code(capsys):
    code, _, err = run(capsys, "rho", "--n", "40", "--prec", "64", "--tol", "1e-40")
    assert code == 2 and "precision failure" in err


def test_gamma(capsys):
    code, out, _ = run(capsys, "gamma", "--p", "3", "--json")
    assert code == 0 and abs(float(json.loads(out)["exp_gamma"]) - 2.7551) < 5e-4
    code, out, _ = run(capsys, "gamma", "--p", "2", "--base", "2", "--json")
    assert json.loads(out)["unit"] == "bits"
    code, _, err = run(capsys, "gamma", "--p", "4")
    assert code == 1 and "4 is not prime" in err


def test_sweep_report(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "1", "3", "--report", str(path))
    assert code == 0 and "3/3 passed" in out
    rows = list(csv.DictReader(path.open()))
    assert [int(r["n"]) for r in rows] == [1, 2, 3]
    assert all(r["beta_nonnegative"] == "pass" for r in rows)


def test_sweep_parallel_keeps_order(capsys, tmp_path):
    path = tmp_path / "sweep.json"
    code, _, _ = run(capsys, "sweep", "26", "31", "--jobs", "3", "--report", str(path))
    rows = json.loads(path.read_text())
    assert code == 0 and [r["n"] for r in rows] == list(range(26, 32))
    assert [r["beta_nonnegative"] for r in rows] == ["pass"] * 2 + ["expected-fail"] * 4
    assert all(r["pi_nonnegative"] == "pass" for r in rows)


def test_entry_point_and_env_precision():
    env = dict(os.environ, MAXENT_PREC_BITS="256")
    out = subprocess.run([sys.executable, "-m", "maxent_triangle", "rho", "--n", "3", "--json"],
                         env=env, capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["bits"] == 256
