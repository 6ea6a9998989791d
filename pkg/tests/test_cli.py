from __future__ import annotations

import json

import pytest

from hardybound import cli
from hardybound.io import read_csv
from hardybound.xprec import format_number, parse_number

CURVE = "segment:-1,1@h=1"


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = cli.main([*args, "-o", str(out)])
    return code, out


def data_files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_eigs(tmp_path):
    code, out = run(tmp_path, "e", "eigs", CURVE, "--n", "24", "--mode", "dd")
    assert code == 0
    rows = read_csv(out / "eigs.csv")
    assert list(rows[0]) == ["n", "lambda", "ln_lambda"]
    lam = [float(r["lambda"]) for r in rows]
    assert all(a > b for a, b in zip(lam, lam[1:]))
    rates = json.loads((out / "rates.json").read_text())
    assert rates
    man = json.loads((out / "manifest.json").read_text())
    assert man["mode"] == "dd" and "rank_cutoff" in man and set(man["outputs"]) == {"eigs.csv", "rates.json"}


def test_bound_is_deterministic_and_round_trips(tmp_path):
    args = ("bound", CURVE, "--n", "24", "--z", "2+1i,3+1i", "--eps", "1e-10..1e-2", "--per-decade", "1")
    c1, d1 = run(tmp_path, "b1", *args)
    c2, d2 = run(tmp_path, "b2", *args)
    c3, d3 = run(tmp_path, "b3", *args, "--jobs", "2")
    assert c1 == c2 == c3 == 0
    assert data_files(d1) == data_files(d2) == data_files(d3)
    m1 = json.loads((d1 / "manifest.json").read_text())
    m2 = json.loads((d2 / "manifest.json").read_text())
    for m in (m1, m2):
        m.pop("timestamp")
        m["config"].pop("output")
        m.pop("config_hash")
    assert m1 == m2
    assert "max_truncation_bound" in m1
    text = (d1 / "bound.csv").read_text()
    rows = read_csv(d1 / "bound.csv")
    assert len(rows) == 18 and "\r" not in text
    for cell in text.splitlines()[1].split(","):
        v = parse_number(cell, "dd")
        assert format_number(v) == cell
    M = [float(r["M"]) for r in rows[:9]]
    assert all(a > b for a, b in zip(M, M[1:]))  # ε decreasing along rows


def test_bound_json_format(tmp_path):
    code, out = run(tmp_path, "bj", "bound", CURVE, "--n", "20", "--z", "2+1i", "--eps", "1e-4", "--format", "json")
    assert code == 0
    recs = json.loads((out / "bound.json").read_text())
    assert len(recs) == 1 and "M" in recs[0]


def test_powerlaw(tmp_path):
    code, out = run(tmp_path, "p", "powerlaw", "segment:-1,1@h=0.5", "--n", "32", "--z", "1.5+0.5i,3+0.5i",
                    "--eps", "1e-10..1e-3", "--per-decade", "2")
    assert code == 0
    fit = read_csv(out / "powerlaw_fit.csv")
    g = [float(r["gamma_hat"]) for r in fit]
    th = [float(r["theta"]) for r in fit]
    assert g[0] > g[1] and all(abs(a - b) < 0.05 * b for a, b in zip(g, th))
    assert len(read_csv(out / "powerlaw_points.csv")) == 2 * 15


def test_rates_boundary_transplant(tmp_path):
    code, out = run(tmp_path, "r", "rates", "--h", "0.5,1")
    assert code == 0
    rows = read_csv(out / "rates.csv")
    assert abs(float(rows[1]["ln_rho_Gamma"]) - 2.969679) < 1e-5
    code, out = run(tmp_path, "bd", "boundary", "--z", "1+1i", "--eps", "1e-6")
    assert code == 0
    b = json.loads((out / "boundary.json").read_text())
    assert list(b) == ["gamma", "rho", "bound", "B"]
    assert float(b["bound"]) == pytest.approx(float(b["rho"]) * 1e-6 ** float(b["gamma"]), rel=1e-14)
    code, out = run(tmp_path, "t", "transplant", "--x", "1,2", "--z", "2+0.5i")
    assert code == 0
    rows = read_csv(out / "transplant.csv")
    assert [r["geometry"] for r in rows] == ["halfstrip", "halfstrip", "segment"]
    assert float(rows[0]["exponent"]) == pytest.approx(0.25, rel=0.05)


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"h_list": [0.5, 1.0], "format": "json", "mode": "f64"}))
    code, out = run(tmp_path, "c", "rates", "--config", str(cfg), "--format", "csv")
    assert code == 0
    assert (out / "rates.csv").exists() and not (out / "rates.json").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["mode"] == "f64" and len(read_csv(out / "rates.csv")) == 2


@pytest.mark.parametrize("args", [
    ("bound", CURVE, "--z", "0.5+1i"),  # z on the curve
    ("bogus",),
    (),
    ("bound", CURVE),  # missing --z
    ("bound", "circle:1", "--z", "2+1i"),
    ("bound", CURVE, "--z", "2-1i"),
    ("boundary", "--z", "1+1i", "--eps", "2"),
    ("rates", "--jobs", "0"),
])
def test_config_errors_exit_1(tmp_path, args, capsys):
    assert cli.main([*args, "-o", str(tmp_path / "x")]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_bad_config_file_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["rates", "--config", str(bad)]) == cli.EXIT_CONFIG
    bad.write_text(json.dumps({"unknown_key": 1}))
    assert cli.main(["rates", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["rates", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_IO


def test_mode_floor_exit_2(tmp_path, capsys):
    code = cli.main(["bound", CURVE, "--n", "20", "--z", "2+1i", "--eps", "1e-12..1e-3", "--mode", "f64",
                     "-o", str(tmp_path / "f")])
    assert code == cli.EXIT_NUMERIC
    assert "floor" in capsys.readouterr().err


def test_unwritable_output_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["rates", "-o", str(blocker / "sub")]) == cli.EXIT_IO


def test_parsers():
    assert cli.parse_complex("2+1i") == 2 + 1j
    assert cli.parse_complex("1i") == 1j and cli.parse_complex("3") == 3
    assert cli.parse_complex("-0.3-2j") == -0.3 - 2j
    assert cli.parse_eps("1e-3..1e-12") == (1e-12, 1e-3)
    with pytest.raises(cli.ConfigError):
        cli.parse_complex("abc")
    with pytest.raises(cli.ConfigError):
        cli.parse_eps("x..y")
