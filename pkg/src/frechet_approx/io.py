"""Plain-text curve files.

One vertex per line, coordinates separated by whitespace and/or commas.
Two optional header lines may appear before the first vertex::

    # dim: 2
    # closed: true

Any other ``#`` text is a comment, and blank lines are ignored.  Without a
``dim`` header the dimension is taken from the first vertex line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ParseError, UsageError
from .geometry import ClosedCurve, PolygonalCurve

_HEADER = re.compile(r"#\s*(dim|closed)\s*:\s*(\S+)\s*$", re.IGNORECASE)
_SPLIT = re.compile(r"[\s,]+")


@dataclass
class CurveFile:
    dim: int
    vertices: np.ndarray
    closed: bool = False

    def curve(self):
        """The validated curve object; bad geometry raises UsageError."""
        cls = ClosedCurve if self.closed else PolygonalCurve
        return cls(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, CurveFile) and self.dim == other.dim and self.closed == other.closed
                and np.array_equal(self.vertices, other.vertices))


def parse_curve(text: str) -> CurveFile:
    dim = None
    closed = False
    rows = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        stripped = raw.strip()
        if stripped.startswith("#"):
            m = _HEADER.match(stripped)
            if m is None:
                continue
            if rows:
                raise ParseError("header lines must precede the vertices", lineno)
            key, val = m.group(1).lower(), m.group(2).lower()
            if key == "dim":
                try:
                    dim = int(val)
                except ValueError:
                    raise ParseError(f"dimension {val!r} is not an integer", lineno) from None
                if dim < 1:
                    raise ParseError("dimension must be at least 1", lineno)
            elif val in ("true", "false"):
                closed = val == "true"
            else:
                raise ParseError(f"closed must be true or false, not {val!r}", lineno)
            continue
        line = stripped.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        try:
            row = [float(f) for f in fields]
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise ParseError(f"token {bad!r} is not a number", lineno) from None
        if dim is None:
            dim = len(row)
        if len(row) != dim:
            raise ParseError(f"expected {dim} coordinates, found {len(row)}", lineno)
        if not np.all(np.isfinite(row)):
            raise ParseError("coordinates must be finite", lineno)
        rows.append(row)
    if len(rows) < 2:
        raise ParseError(f"a curve needs at least 2 vertices, found {len(rows)}", max(1, last_line))
    return CurveFile(dim, np.array(rows, dtype=float), closed)


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def write_curve(curve) -> str:
    """Serialise a CurveFile or curve object with 17 significant digits."""
    if isinstance(curve, CurveFile):
        V, closed = curve.vertices, curve.closed
    elif isinstance(curve, (PolygonalCurve, ClosedCurve)):
        V, closed = curve.vertices, isinstance(curve, ClosedCurve)
    else:
        raise UsageError("write_curve expects a CurveFile or a curve")
    lines = [f"# dim: {V.shape[1]}", f"# closed: {'true' if closed else 'false'}"]
    lines.extend(" ".join(f"{x:.17g}" for x in row) for row in V)
    return "\n".join(lines) + "\n"


def load_curve(path: Union[str, Path], closed: bool = None):
    """Read and validate a curve file; ``closed=True`` overrides the header."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    cf = parse_curve(text)
    if closed:
        cf.closed = True
    return cf.curve()


def save_curve(path: Union[str, Path], curve) -> None:
    Path(path).write_text(write_curve(curve))
