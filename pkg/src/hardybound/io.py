"""CSV/JSON writers with 33-digit decimal cells, and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import time
from pathlib import Path

import numpy as np

from .xprec import DDComplex, DDReal, format_number


def format_cell(value) -> str:
    """Text for one CSV cell; reals get 33 significant digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, DDReal):
        return format_number(value)
    if isinstance(value, (DDComplex, complex, np.complexfloating)):
        raise TypeError("complex values must be split into real and imaginary columns")
    return format_number(float(value))


def to_jsonable(value):
    """Recursively convert to JSON types; reals become 33-digit strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, DDComplex):
        return [format_number(value.real), format_number(value.imag)]
    if isinstance(value, (complex, np.complexfloating)):
        return [format_number(value.real), format_number(value.imag)]
    if value is None or isinstance(value, (str, bool)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return format_number(value)


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(h) for h in header]
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def write_text(path: Path, text: str) -> str:
    """Write UTF-8 text with LF endings; returns the SHA-256 of the bytes."""
    data = text.encode("utf-8")
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def config_hash(config: dict) -> str:
    canon = json.dumps(to_jsonable(config), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def manifest(config: dict, outputs: dict, extra: dict | None = None) -> dict:
    """Run record: config and its hash, output hashes, diagnostics, timestamp."""
    from . import __version__

    rec = {
        "version": __version__,
        "config": config,
        "config_hash": config_hash(config),
        "outputs": outputs,
    }
    if extra:
        rec.update(extra)
    rec["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return rec


__all__ = [
    "format_cell",
    "to_jsonable",
    "csv_text",
    "json_text",
    "write_text",
    "read_csv",
    "config_hash",
    "manifest",
]
