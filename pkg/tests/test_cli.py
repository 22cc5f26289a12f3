import cmath
import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fareyzeta import cli, fareytree, fredholm, zeta


@pytest.fixture
def cache_file(tmp_path, monkeypatch):
    path = tmp_path / "cache.jsonl"
    monkeypatch.setenv(cli.CACHE_ENV, str(path))
    return path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def lines(out):
    return [json.loads(x) for x in out.splitlines() if x.strip()]


def test_det_zero_at_q_one(capsys, cache_file):
    code, out, _ = run(capsys, "det", "--sign", "minus", "--q", "1,0", "--z", "1,0", "--order", "24")
    assert code == 0
    (rec,) = lines(out)
    assert abs(complex(*rec["value"])) < 1e-6
    assert rec["cauchy_error"] >= 0


def test_det_at_zero_z(capsys, cache_file):
    _, out, _ = run(capsys, "det", "--q", "2,0", "--z", "0,0")
    assert lines(out)[0]["value"] == [1.0, 0.0]


def test_cache_hit_gives_identical_output(capsys, cache_file):
    argv = ["det", "--sign", "plus", "--q", "1.3,0.4", "--z", "0.7,0"]
    _, first, _ = run(capsys, *argv)
    size = cache_file.stat().st_size
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert cache_file.stat().st_size == size  # nothing appended on a hit


def test_cache_round_trip_and_recomputation(tmp_path):
    c = cli.Cache(tmp_path / "c.jsonl")
    v = fredholm.det_one_minus("minus", 1.1 + 0.2j, 0.6, 20).value
    c.put("det_minus", 1.1 + 0.2j, 0.6 + 0j, 20, v)
    reread = cli.Cache(tmp_path / "c.jsonl").get("det_minus", 1.1 + 0.2j, 0.6 + 0j, 20)
    assert complex(*reread["value"]) == v  # bit-identical through JSON
    assert abs(complex(*reread["value"]) - fredholm.det_one_minus("minus", 1.1 + 0.2j, 0.6, 20).value) < 1e-12
    assert set(reread) >= {"kind", "q", "z", "order", "value", "timestamp", "version"}


def test_cache_skips_corrupt_trailing_line(tmp_path):
    path = tmp_path / "c.jsonl"
    c = cli.Cache(path)
    c.put("det_plus", 1 + 0j, 0.5 + 0j, 24, 2 + 0j)
    with path.open("a") as fh:
        fh.write('{"kind": "det_plus", "q": [1.0, 0')
    again = cli.Cache(path)
    assert again.get("det_plus", 1 + 0j, 0.5 + 0j, 24)["value"] == [2.0, 0.0]
    assert len(again.entries) == 1


def test_no_cache_flag_writes_nothing(capsys, cache_file):
    run(capsys, "det", "--q", "1.5", "--z", "0.5", "--no-cache")
    assert not cache_file.exists()


def test_convergence_flag(capsys, cache_file):
    _, out, _ = run(capsys, "det", "--q", "1.2,0", "--z", "0.8,0", "--order", "18", "--convergence")
    recs = lines(out)
    assert [r["order"] for r in recs[:2]] == [18, 24]
    diff = abs(complex(*recs[0]["value"]) - complex(*recs[1]["value"]))
    assert recs[2]["convergence"] and recs[2]["difference"] == pytest.approx(diff, rel=1e-12)


@pytest.mark.parametrize(
    "argv,code",
    [
        (["det", "--q=-1,0", "--z", "0.5,0"], 2),
        (["det", "--q", "0.4,0", "--z", "1,0"], 2),
        (["pressure", "--q=-2"], 2),
        (["scan", "--q-start", "1", "--q-end", "2", "--steps", "0"], 2),
        (["scan", "--q-start", "1,0", "--q-end", "2,1", "--steps", "3", "--axis", "real"], 2),
        (["orbits", "--map", "gauss", "--n", "1", "--q", "0.6", "--cutoff", "100"], 3),
    ],
)
def test_exit_codes(capsys, cache_file, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code and err


def test_order_range_is_enforced(capsys):
    with pytest.raises(SystemExit):
        cli.main(["det", "--q", "1", "--order", "200"])
    with pytest.raises(SystemExit):
        cli.main(["det", "--q", "1", "--order", "4"])


def read_scan(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == cli.SCAN_HEADER
    return [dict(zip(rows[0], map(float, r))) for r in rows[1:] if r and not r[0].startswith("#")]


def test_scan_at_zero_z_is_all_ones(capsys, cache_file):
    _, out, _ = run(capsys, "scan", "--q-start", "1,0", "--q-end", "2,1", "--steps", "4", "--z", "0,0")
    rows = read_scan(out)
    assert len(rows) == 4
    assert all(r["dm_re"] == r["dp_re"] == r["Z_re"] == 1 and r["dm_im"] == 0 for r in rows)


def test_one_point_scan_matches_det(capsys, cache_file):
    _, out, _ = run(capsys, "scan", "--q-start", "1.3,0.2", "--q-end", "1.3,0.2", "--steps", "1",
                    "--z", "0.6,0", "--no-cache")
    (row,) = read_scan(out)
    _, det_out, _ = run(capsys, "det", "--q", "1.3,0.2", "--z", "0.6,0", "--no-cache")
    assert complex(row["dm_re"], row["dm_im"]) == complex(*lines(det_out)[0]["value"])


def test_critical_line_scan_brackets_first_riemann_zero(capsys, cache_file):
    # q = 1/4 + i t/2 for t in [13, 15]
    _, out, _ = run(capsys, "scan", "--q-start", "0.25,6.5", "--q-end", "0.25,7.5", "--steps", "81",
                    "--axis", "vertical-line", "--continuation", "--no-cache")
    rows = read_scan(out)
    phases = [cmath.phase(complex(r["dm_re"], r["dm_im"])) for r in rows]
    jumps = [i for i in range(80) if abs(math.remainder(phases[i + 1] - phases[i], 2 * math.pi)) > 2.5]
    assert len(jumps) == 1
    t_lo, t_hi = 2 * rows[jumps[0]]["im_q"], 2 * rows[jumps[0] + 1]["im_q"]
    assert t_lo <= 14.1347 <= t_hi


def test_scan_interrupt_and_resume(tmp_path, capsys, monkeypatch, cache_file):
    out = tmp_path / "scan.csv"
    base = ["scan", "--q-start", "1,0", "--q-end", "1,2", "--steps", "5", "--z", "0.5,0", "--no-cache"]
    argv = base + ["--output", str(out)]
    real = cli._scan_row
    calls = {"n": 0}

    def flaky(task):
        calls["n"] += 1
        if calls["n"] == 3:
            raise KeyboardInterrupt
        return real(task)

    monkeypatch.setattr(cli, "_scan_row", flaky)
    code, _, _ = run(capsys, *argv)
    assert code == 1
    assert "# interrupted" in out.read_text()
    monkeypatch.setattr(cli, "_scan_row", real)
    assert run(capsys, *argv, "--resume")[0] == 0
    resumed = read_scan(out.read_text())
    _, fresh, _ = run(capsys, *base)
    assert resumed == read_scan(fresh)


def test_parallel_scan_matches_serial(capsys, cache_file):
    base = ["scan", "--q-start", "0.8,0", "--q-end", "1.6,0", "--steps", "4", "--z", "0.9,0", "--no-cache"]
    _, serial, _ = run(capsys, *base)
    _, parallel, _ = run(capsys, *base, "--workers", "2")
    assert serial == parallel


def test_zeta_command(capsys, cache_file):
    _, out, _ = run(capsys, "zeta", "--kind", "ruelle", "--q", "2", "--z", "0.3")
    rec = lines(out)[0]
    assert complex(*rec["value"]) == zeta.ruelle_zeta(2, 0.3, rec["order"]).value


def test_zeros_command(capsys, cache_file):
    code, out, _ = run(capsys, "zeros", "--q0", "0.25,6.5", "--q1", "0.25,7.5")
    (rec,) = lines(out)
    assert code == 0 and rec["parity"] == "even"
    assert abs(complex(*rec["location"]) - complex(0.25, 7.0673625709)) < 1e-8


def test_farey_series_tables(capsys):
    _, out, _ = run(capsys, "farey-series", "--q", "1", "--n-max", "3", "--z", "0.5")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["n", "lambda_re", "lambda_im"]
    lam2 = fareytree.lambda_n(2, 1)
    assert complex(float(rows[2][1]), float(rows[2][2])) == pytest.approx(lam2, rel=1e-15)
    assert any(r and r[0].startswith("# lambda_series") for r in rows)
    _, tree, _ = run(capsys, "farey-series", "--tree-rows", "3")
    assert tree.splitlines()[0] == "n,a,b,word,T" and len(tree.splitlines()) == 8


def test_orbits_command(capsys):
    _, out, _ = run(capsys, "orbits", "--n", "3", "--q", "0")
    assert lines(out)[0]["value"] == [8.0, 0.0]
    _, table, _ = run(capsys, "orbits", "--n", "4", "--q", "1.3", "--dictionary")
    rows = list(csv.reader(io.StringIO(table)))
    assert len(rows) == 5 and all(float(r[4]) < 1e-12 for r in rows[1:])


def test_trace_command_routes_agree(capsys, cache_file):
    _, out, _ = run(capsys, "trace", "--q", "1", "--z", "0.5", "--order", "40")
    vals = [complex(*r["value"]) for r in lines(out)]
    assert len(vals) == 3 and max(abs(a - b) for a in vals for b in vals) < 1e-8


def test_pressure_and_spectrum_commands(capsys):
    _, out, _ = run(capsys, "pressure", "--q", "0.9")
    z_star = fredholm.leading_eigenvalue_unit_crossing(0.9, (0.5, 0.99))
    assert lines(out)[0]["z_star"] == pytest.approx(z_star, abs=1e-9)
    _, out, _ = run(capsys, "spectrum", "--q", "1", "--count", "2")
    assert lines(out)[1]["modulus"] == pytest.approx(0.3036630029, abs=1e-9)
    _, out, _ = run(capsys, "spectrum", "--kind", "p1", "--q", "1", "--count", "3")
    assert lines(out)[2]["value"][0] == pytest.approx(((5**0.5 - 1) / 2) ** 6, rel=1e-12)


def test_selfcheck_suite(capsys, tmp_path):
    report_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "selfcheck", "--suite", "fareytree", "--rows", "14", "--json", str(report_path))
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert json.loads(report_path.read_text()) == report
    assert all(c["passed"] for c in report["suites"]["fareytree"]["checks"])


def test_selfcheck_reports_failures(capsys, monkeypatch):
    from fareyzeta import _selfcheck

    monkeypatch.setitem(_selfcheck.SUITES, "maps", lambda rows: iter([("forced", 1.0, 0.0)]))
    code, out, _ = run(capsys, "selfcheck", "--suite", "maps")
    assert code == 1 and not json.loads(out)["passed"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fareyzeta", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()


def test_selfcheck_grading_report_is_informational(capsys):
    code, out, _ = run(capsys, "selfcheck", "--suite", "zeta", "--grading-report")
    report = json.loads(out)
    assert code == 0 and report["grading_report"]["open_question"] is True
    assert report["grading_report"]["xi_vs_farey"]
