"""Plain-text instance files.

Layout::

    l0bnb-instance v1
    <m> <n> <lambda> <M>
    # key=value          (zero or more metadata lines)
    <row 1 of A: n numbers>
    ...
    <row m of A>
    <y: m numbers>

Numbers are written with 17 significant digits so doubles round-trip
exactly. Metadata values are JSON.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .datagen import GeneratedInstance
from .model import Instance

MAGIC = "l0bnb-instance v1"


class InstanceFormatError(ValueError):
    """Malformed instance file; carries the 1-based line (and column) at fault."""

    def __init__(self, message: str, line: int, column: int | None = None, path=None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        prefix = f"{path}: " if path is not None else ""
        super().__init__(f"{prefix}{where}: {message}")
        self.line = line
        self.column = column


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _fmt_row(values) -> str:
    values = np.asarray(values, dtype=np.float64)
    return " ".join(["%.17g"] * values.size) % tuple(values.tolist())


def format_instance(instance: Instance, metadata: dict | None = None) -> str:
    lines = [
        MAGIC,
        f"{instance.m} {instance.n} {_fmt(instance.lam)} {_fmt(instance.big_m)}",
    ]
    for key, value in (metadata or {}).items():
        key = str(key)
        if not key or "=" in key or any(c.isspace() for c in key):
            raise ValueError(f"invalid metadata key {key!r}")
        lines.append(f"# {key}={json.dumps(value)}")
    lines.extend(_fmt_row(row) for row in instance.a_matrix)
    lines.append(_fmt_row(instance.y))
    return "\n".join(lines) + "\n"


def write_instance(path, data: Instance | GeneratedInstance, metadata: dict | None = None) -> None:
    """Write atomically: the text goes to a temp file renamed over ``path``."""
    if isinstance(data, GeneratedInstance):
        meta = dict(data.metadata)
        meta.update(metadata or {})
        instance = data.instance
    else:
        meta = dict(metadata or {})
        instance = data
    text = format_instance(instance, meta)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_numbers(text: str, lineno: int, path) -> np.ndarray:
    tokens = text.split()
    try:
        fast = np.array(tokens, dtype=np.float64)
    except ValueError:
        pass
    else:
        if np.all(np.isfinite(fast)):
            return fast
    # slow path: find the offending token for the error message
    out = []
    col = 1
    for token in text.split():
        try:
            value = float(token)
        except ValueError:
            raise InstanceFormatError(f"malformed number {token!r}", lineno, col, path) from None
        if not np.isfinite(value):
            raise InstanceFormatError(f"non-finite number {token!r}", lineno, col, path)
        out.append(value)
        col += 1
    return np.array(out)


def parse_instance(text: str, path=None) -> tuple[Instance, dict]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        found = lines[0].strip() if lines else ""
        raise InstanceFormatError(f"expected header {MAGIC!r}, found {found!r}", 1, path=path)

    if len(lines) < 2:
        raise InstanceFormatError("missing dimension line", 2, path=path)
    head = lines[1].split()
    if len(head) != 4:
        raise InstanceFormatError(f"expected 'm n lambda M', got {len(head)} fields", 2, path=path)
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceFormatError("m and n must be integers", 2, path=path) from None
    if m < 1 or n < 1:
        raise InstanceFormatError(f"dimensions must be positive, got m={m}, n={n}", 2, path=path)
    lam, big_m = _parse_numbers(" ".join(head[2:]), 2, path)
    if not lam > 0:
        raise InstanceFormatError(f"lambda must be positive, got {lam!r}", 2, 3, path)
    if not big_m > 0:
        raise InstanceFormatError(f"M must be positive, got {big_m!r}", 2, 4, path)

    metadata = {}
    idx = 2
    while idx < len(lines) and lines[idx].startswith("#"):
        body = lines[idx][1:].strip()
        key, sep, raw = body.partition("=")
        if not sep or not key:
            raise InstanceFormatError("metadata line must read '# key=value'", idx + 1, path=path)
        try:
            metadata[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            metadata[key.strip()] = raw
        idx += 1

    body = lines[idx:]
    if len(body) != m + 1:
        lineno = idx + 1 + min(len(body), m + 1)
        raise InstanceFormatError(
            f"expected {m} matrix rows and 1 observation line, found {len(body)} data lines",
            lineno, path=path,
        )
    a = np.empty((m, n))
    for r in range(m):
        lineno = idx + 1 + r
        values = _parse_numbers(body[r], lineno, path)
        if len(values) != n:
            raise InstanceFormatError(
                f"row {r + 1} has {len(values)} values, expected {n}", lineno, path=path
            )
        a[r] = values
    lineno = idx + 1 + m
    y = _parse_numbers(body[m], lineno, path)
    if len(y) != m:
        raise InstanceFormatError(f"y has {len(y)} values, expected {m}", lineno, path=path)
    return Instance(a, y, lam, big_m), metadata


def read_instance(path) -> tuple[Instance, dict]:
    """Parse an instance file; returns the instance and its metadata map."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_instance(text, path)
