"""JSON problem/report files and CSV curves.

Complex numbers are stored as ``[re, im]`` pairs and matrices as row-major
nested lists of pairs.  Floats are written with Python's shortest
round-trip ``repr``, so parsing a written file gives back the same bits.
Non-finite values are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import re
from pathlib import Path

import numpy as np

from .core import BlockOperator, KreinStructure
from .errors import InvalidParamsError

PROBLEM_SCHEMA = "krein-problem/1"
REPORT_SCHEMA = "krein-report/1"
BLOCK_NAMES = ("A11", "A12", "A21", "A22")


class FormatError(InvalidParamsError):
    code = "format_error"


def _real(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    """Recursively convert dataclasses, arrays and complex numbers to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_real(obj.real), _real(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


_SCALAR_LIST = re.compile(r"\[\s+([^\[\]{}\"]*?)\s+\]")


def dumps(obj) -> str:
    """Sorted-key JSON with one level of indentation per nesting and flat scalar lists."""
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=1, allow_nan=False)
    text = _SCALAR_LIST.sub(lambda m: "[" + ", ".join(t.strip() for t in m.group(1).split(",")) + "]", text)
    return text + "\n"


def _parse_real(x, where):
    if isinstance(x, bool):
        raise FormatError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if x in ("inf", "-inf", "nan"):
        return float(x)
    raise FormatError(f"{where}: expected a number, got {x!r}")


def _parse_entry(e, where):
    if isinstance(e, list):
        if len(e) != 2:
            raise FormatError(f"{where}: complex entries must be [re, im] pairs")
        return complex(_parse_real(e[0], where), _parse_real(e[1], where))
    return complex(_parse_real(e, where), 0.0)


def _parse_matrix(rows, shape, name):
    if not isinstance(rows, list) or len(rows) != shape[0]:
        raise FormatError(f"{name}: expected {shape[0]} rows")
    out = np.empty(shape, dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise FormatError(f"{name}: row {i} must have {shape[1]} entries")
        for j, e in enumerate(row):
            out[i, j] = _parse_entry(e, f"{name}[{i}][{j}]")
    return out


def problem_to_dict(A: BlockOperator, metadata: dict | None = None) -> dict:
    d = {
        "schema": PROBLEM_SCHEMA,
        "n_plus": A.n_plus,
        "n_minus": A.n_minus,
        "blocks": {name: getattr(A, name) for name in BLOCK_NAMES},
    }
    if metadata:
        d["metadata"] = dict(metadata)
    return d


def problem_from_dict(d) -> tuple[BlockOperator, dict]:
    if not isinstance(d, dict):
        raise FormatError("problem file must hold a JSON object")
    if d.get("schema") != PROBLEM_SCHEMA:
        raise FormatError(f"schema must be {PROBLEM_SCHEMA!r}, got {d.get('schema')!r}")
    try:
        st = KreinStructure(d["n_plus"], d["n_minus"])
        blocks = d["blocks"]
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None
    p, m = st.n_plus, st.n_minus
    shapes = {"A11": (p, p), "A12": (p, m), "A21": (m, p), "A22": (m, m)}
    try:
        parsed = {k: _parse_matrix(blocks[k], shapes[k], k) for k in BLOCK_NAMES}
    except KeyError as exc:
        raise FormatError(f"missing block {exc.args[0]!r}") from None
    return BlockOperator(st, **parsed), dict(d.get("metadata") or {})


def write_problem(path, A: BlockOperator, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(problem_to_dict(A, metadata)))


def read_problem(path) -> tuple[BlockOperator, dict]:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_dict(d)


def canonicalize(text: str) -> str:
    """Canonical form of a problem file: parse and rewrite."""
    A, meta = problem_from_dict(json.loads(text))
    return dumps(problem_to_dict(A, meta))


def write_report(path, report: dict) -> None:
    report = dict(report)
    report["schema"] = REPORT_SCHEMA
    Path(path).write_text(dumps(report))


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def sibling(path, suffix: str) -> Path:
    """``out.json`` -> ``out_<suffix>.csv``."""
    p = Path(path)
    return p.with_name(f"{p.stem}_{suffix}.csv")
