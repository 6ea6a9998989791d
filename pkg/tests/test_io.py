from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardybound.io import config_hash, csv_text, format_cell, json_text, manifest, read_csv, to_jsonable, write_text
from hardybound.xprec import DDComplex, DDReal, parse_number


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_cell_round_trips_binary64(x):
    assert parse_number(format_cell(x), "f64") == x


def test_format_cell_kinds():
    assert format_cell("abc") == "abc"
    assert format_cell(True) == "true" and format_cell(np.bool_(False)) == "false"
    assert format_cell(7) == "7" and format_cell(np.int64(-3)) == "-3"
    assert format_cell(None) == ""
    x = DDReal(1.0, 2.0**-70)
    back = parse_number(format_cell(x), "dd")
    assert float(back.hi) == 1.0 and float(back.lo) == 2.0**-70
    with pytest.raises(TypeError):
        format_cell(1 + 2j)


def test_csv_has_header_and_lf_endings(tmp_path):
    text = csv_text(["a", "b"], [[1, 0.5], {"a": 2, "b": None}])
    assert "\r" not in text and text.endswith("\n")
    lines = text.splitlines()
    assert lines[0] == "a,b" and lines[2] == "2,"
    path = tmp_path / "t.csv"
    digest = write_text(path, text)
    assert len(digest) == 64 and b"\r\n" not in path.read_bytes()
    rows = read_csv(path)
    assert float(rows[0]["b"]) == 0.5


def test_json_is_stable_and_complex_is_split():
    obj = {"z": 1 + 2j, "arr": np.array([0.25]), "k": 3, "flag": np.bool_(True), "none": None}
    a, b = json_text(obj), json_text(dict(obj))
    assert a == b and a.endswith("\n")
    d = json.loads(a)
    assert list(d) == ["z", "arr", "k", "flag", "none"]
    assert [float(v) for v in d["z"]] == [1.0, 2.0]
    assert d["k"] == 3 and d["flag"] is True and d["none"] is None
    dz = to_jsonable(DDComplex(DDReal(0.5), DDReal(-1.0)))
    assert [float(v) for v in dz] == [0.5, -1.0]


def test_manifest_fields_and_hash():
    cfg = {"command": "rates", "h_list": [0.5, 1.0]}
    rec = manifest(cfg, {"rates.csv": "00"}, {"mode": "dd"})
    assert list(rec)[:4] == ["version", "config", "config_hash", "outputs"]
    assert list(rec)[-1] == "timestamp" and rec["mode"] == "dd"
    assert rec["config_hash"] == config_hash(dict(reversed(list(cfg.items()))))
    assert config_hash({**cfg, "h_list": [0.5]}) != rec["config_hash"]
