"""Plot-ready matrix files.

CSV: a ``# key=value,...`` header line, then one row per state in
enumeration order, 17 significant digits per value. JSON:
``{"header": {...}, "values": [[...], ...]}``. Both read back bit-exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List

import numpy as np

from .errors import ConfigError

_DIGITS = ".17g"


@dataclass(eq=False)
class MatrixFile:
    header: Dict[str, str]
    values: np.ndarray = field(repr=False)


def format_value(value: float) -> str:
    return format(float(value), _DIGITS)


def _header_line(header: Dict[str, str]) -> str:
    return "# " + ",".join(f"{key}={value}" for key, value in header.items())


def write_csv(path: Path, matrix: MatrixFile) -> Path:
    path = Path(path)
    lines = [_header_line(matrix.header)]
    lines.extend(",".join(format_value(v) for v in row) for row in np.atleast_2d(matrix.values))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: Path) -> MatrixFile:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ConfigError("missing '# key=value' header line", path=path)
    header: Dict[str, str] = {}
    for item in lines[0][2:].split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"malformed header item {item!r}", path=path)
        header[key] = value
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:] if line]
    return MatrixFile(header=header, values=np.array(rows))


def write_json(path: Path, matrix: MatrixFile) -> Path:
    path = Path(path)
    document = {"header": matrix.header, "values": np.atleast_2d(matrix.values).tolist()}
    path.write_text(json.dumps(document, indent=1) + "\n")
    return path


def read_json(path: Path) -> MatrixFile:
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc.msg})", path=path) from exc
    return MatrixFile(header=dict(document["header"]), values=np.array(document["values"], dtype=float))


def write_matrix(stem: Path, matrix: MatrixFile, formats: Iterable[str]) -> List[Path]:
    """Write ``stem.csv`` and/or ``stem.json``; returns the written paths."""

    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        if fmt == "csv":
            written.append(write_csv(stem.parent / f"{stem.name}.csv", matrix))
        elif fmt == "json":
            written.append(write_json(stem.parent / f"{stem.name}.json", matrix))
        else:
            raise ConfigError(f"unknown output format {fmt!r}", field="formats")
    return written


def read_matrix(path: Path) -> MatrixFile:
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path)
    return read_csv(path)
