"""Matrix files and canonical JSON reports.

Matrix CSV is plain comma-separated rows with no header. Matrix JSON is
``{"n": int, "rows": [[...], ...]}``. Reports are written as canonical
JSON: sorted keys, no insignificant whitespace variation, and every float
printed with 17 significant digits so identical runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .linalg import check_symmetric


def _float_token(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy containers and scalars, dataclass-like ``to_dict`` objects and enums to JSON types."""
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _emit(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = ","
    colon = ": " if indent else ":"
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_token(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(sep)
            out.append(pad)
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(colon)
            _emit(obj[key], out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(v is None or isinstance(v, (bool, int, float, str)) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                if i:
                    out.append(", " if indent else ",")
                _emit(v, out, indent, level + 1)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(sep)
            out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj, indent: int = 2) -> str:
    out: list[str] = []
    _emit(to_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(obj), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Matrices


def matrix_to_dict(A) -> dict:
    a = np.asarray(A, dtype=float)
    return {"n": int(a.shape[0]), "rows": a.tolist()}


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        n, rows = int(d["n"]), d["rows"]
    except (KeyError, TypeError, ValueError):
        raise InputError('matrix JSON needs keys "n" and "rows"') from None
    a = np.array(rows, dtype=float)
    if a.shape != (n, n):
        raise InputError(f"matrix JSON declares n={n} but rows have shape {a.shape}")
    return check_symmetric(a)


def write_matrix(path, A, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        return write_json(path, matrix_to_dict(A))
    if fmt != "csv":
        raise InputError(f"unknown matrix format {fmt!r}")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(A, dtype=float):
            w.writerow([format(float(x), ".17g") for x in row])
    return path


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        return matrix_from_dict(json.loads(path.read_text(encoding="utf-8")))
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    try:
        a = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return check_symmetric(a)
