import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from parabolic_max import cli
from parabolic_max.series import density_fN, tail_probability_G


def run(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_moments_default(capsys):
    code, out, _ = run(["moments"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["route", "quantity", "value", "err_est"]
    values = {r[1]: float(r[2]) for r in table[1:]}
    assert values["en"] == pytest.approx(0.6955289995, abs=1e-8)
    assert values["em"] == pytest.approx(0.9961930199, abs=1e-8)
    assert len(table) == 7


def test_moments_json_round_trip(capsys):
    code, out, _ = run(["moments", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    m = doc["manifest"]
    assert m["command"] == "moments" and m["config"]["terms"] == 200 and m["config"]["tail"] == "asymptotic"
    assert {"version", "wall_time_s", "warnings", "backend"} <= set(m)
    code, csv_out, _ = run(["moments"], capsys)
    csv_vals = {r[1]: float(r[2]) for r in rows(csv_out)[1:]}
    assert doc["results"]["series"]["values"] == csv_vals


def test_moments_few_terms_are_honest(capsys):
    _, ref, _ = run(["moments"], capsys)
    _, out, _ = run(["moments", "--terms", "2"], capsys)
    ref = {r[1]: float(r[2]) for r in rows(ref)[1:]}
    small = {r[1]: (float(r[2]), float(r[3])) for r in rows(out)[1:]}
    for q, (v, e) in small.items():
        assert e > 1e-4
        assert abs(v - ref[q]) <= e


def test_moments_all_routes_consistent(capsys):
    code, out, err = run(["moments", "--route", "all", "--paths", "2e4", "--step", "1e-3", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0, err
    assert doc["consistent"] is True
    assert set(doc["results"]) == {"series", "integral", "mc"}
    assert doc["manifest"]["config"]["paths"] == 20000


def test_usage_errors(capsys):
    assert run(["moments", "--route", "bogus"], capsys)[0] == 2
    assert run(["moments", "--tail", "asymptotic", "--terms", "20"], capsys)[0] == 2
    assert run(["moments", "--terms", "1"], capsys)[0] == 2
    assert run(["validate", "--suite", "nope"], capsys)[0] == 2
    assert run(["dist", "--what", "cdf", "--dist", "N"], capsys)[0] == 2
    assert run(["dist", "--what", "cdf", "--dist", "N", "--grid", "1:0:5"], capsys)[0] == 2
    assert run(["dist", "--what", "cdf", "--dist", "N", "--x", "-1"], capsys)[0] == 2
    assert run(["hitting", "--x", "0", "--grid", "0:1:3"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_dist_cdf_at_zero(capsys):
    code, out, _ = run(["dist", "--what", "cdf", "--dist", "N", "--x", "0"], capsys)
    assert code == 0
    assert rows(out) == [["x", "cdf_N"], ["0", "0"]]


def test_dist_pdf_grid(capsys):
    code, out, _ = run(["dist", "--what", "pdf", "--dist", "M", "--grid", "0:4:401"], capsys)
    table = rows(out)[1:]
    assert code == 0 and len(table) == 401
    x = np.array([float(r[0]) for r in table])
    f = np.array([float(r[1]) for r in table])
    assert np.all(f >= 0)
    assert np.sum((f[1:] + f[:-1]) / 2 * np.diff(x)) == pytest.approx(1.0, abs=1e-3)


def test_dist_values_pass_through(capsys):
    _, out, _ = run(["dist", "--what", "pdf", "--dist", "N", "--grid", "0.5:2.5:5"], capsys)
    for r in rows(out)[1:]:
        assert float(r[1]) == pytest.approx(density_fN(float(r[0])), rel=1e-13)
    _, out, _ = run(["dist", "--what", "cdf", "--dist", "M", "--grid", "0:3:7"], capsys)
    vals = [float(r[1]) for r in rows(out)[1:]]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[2] == pytest.approx((1 - tail_probability_G(1.0)) ** 2, rel=1e-14)


def test_csv_digits(capsys):
    _, out, _ = run(["dist", "--what", "cdf", "--dist", "N", "--x", "1"], capsys)
    value = rows(out)[1][1]
    assert float(value) == 1 - tail_probability_G(1.0)
    assert len(value.replace("0.", "").lstrip("0")) >= 16


def test_hitting(capsys):
    code, out, _ = run(["hitting", "--x", "0.5", "--grid", "0:6:601"], capsys)
    table = rows(out)
    assert code == 0 and table[0] == ["t", "f_tau", "cumulative"] and len(table) == 602
    f = np.array([float(r[1]) for r in table[1:]])
    cum = np.array([float(r[2]) for r in table[1:]])
    assert np.all(f >= 0)
    assert cum[-1] == pytest.approx(tail_probability_G(0.5), abs=1e-6)
    _, out2, _ = run(["hitting", "--x", "1.0", "--grid", "0:6:601"], capsys)
    cum2 = np.array([float(r[2]) for r in rows(out2)[1:]])
    assert np.all(cum2 <= cum + 1e-15)


def test_zeros(capsys):
    code, out, _ = run(["zeros", "--count", "20"], capsys)
    table = rows(out)
    assert table[0] == ["k", "a_k", "aip", "bi", "hi", "phi"]
    assert float(table[1][1]) == pytest.approx(-2.338107410459767, abs=1e-14)
    k = np.array([int(r[0]) for r in table[1:]])
    aip = np.array([float(r[2]) for r in table[1:]])
    bi = np.array([float(r[3]) for r in table[1:]])
    assert np.all(np.sign(aip) == (-1.0) ** (k + 1)) and np.all(np.sign(bi) == (-1.0) ** k)
    assert np.all(np.array([float(r[5]) for r in table[1:]]) < 0)


def test_out_file_and_manifest(tmp_path, capsys):
    target = tmp_path / "zeros.csv"
    code, out, _ = run(["zeros", "--count", "3", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert target.read_text().startswith("k,a_k")
    manifest = json.loads((tmp_path / "zeros.csv.manifest.json").read_text())
    assert manifest["schema"] == 1 and manifest["manifest"]["config"] == {"count": 3}


def test_reruns_are_identical(capsys):
    a = json.loads(run(["moments", "--route", "mc", "--paths", "1e4", "--step", "1e-3", "--json"], capsys)[1])
    b = json.loads(run(["moments", "--route", "mc", "--paths", "1e4", "--step", "1e-3", "--json"], capsys)[1])
    assert a["rows"] == b["rows"]
    assert a["manifest"]["config"] == b["manifest"]["config"]


def test_validate_suites(capsys):
    code, out, _ = run(["validate", "--suite", "identities"], capsys)
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(["validate", "--suite", "airy", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"] is True and doc["schema"] == 1


def test_validate_mc_small(capsys):
    code, out, _ = run(["validate", "--suite", "mc", "--paths", "5e4"], capsys)
    assert code == 0, out


def test_validate_failure_exit_code(capsys, monkeypatch):
    from parabolic_max import validation

    monkeypatch.setitem(validation.SUITES, "airy", lambda: [validation._check("airy", "forced", 1.0, 0.0)])
    code, out, err = run(["validate", "--suite", "airy"], capsys)
    assert code == 3 and "FAIL" in out and "forced" in err


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "parabolic_max.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "parabolic-max" in res.stdout
