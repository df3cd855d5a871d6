"""Protograph container and text format.

A protograph file looks like::

    # optional comment lines
    rows cols e
    <rows lines of cols non-negative integers>
    (row,col,slot)=label (row,col)=label ...
    <cols puncture bits>

Rows, columns and slots are 0-based. ``(row,col)=label`` assigns the label to
every parallel-edge slot at that position. Labels must be exactly ``1..e``.
The edge-type line is omitted when the matrix has no edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class ProtographFormatError(ValueError):
    """Base class for protograph parse errors; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class RaggedMatrixError(ProtographFormatError):
    pass


class NegativeEntryError(ProtographFormatError):
    pass


class EdgeTypeLabelError(ProtographFormatError):
    pass


class PunctureLengthError(ProtographFormatError):
    pass


_ASSIGN = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*=\s*(-?\d+)")


@dataclass(frozen=True, eq=False)
class Protograph:
    """Base matrix with one edge-type label per parallel-edge slot.

    Parameters
    ----------
    base_matrix : ndarray of int, shape (rows, cols)
        Number of parallel edges between proto-CN ``row`` and proto-VN ``col``.
    edge_types : dict
        Maps ``(row, col, slot)`` to a label in ``1..e``.
    punctured : tuple of bool
        One flag per proto-VN.
    name : str
    """

    base_matrix: np.ndarray
    edge_types: dict
    punctured: tuple
    name: str = "protograph"

    def __post_init__(self):
        base = np.array(self.base_matrix, dtype=np.int64, copy=True)
        if base.ndim != 2:
            raise ProtographFormatError("base matrix must be two-dimensional")
        if (base < 0).any():
            raise NegativeEntryError("base matrix entries must be >= 0")
        base.setflags(write=False)
        object.__setattr__(self, "base_matrix", base)
        object.__setattr__(self, "punctured", tuple(bool(p) for p in self.punctured))
        if len(self.punctured) != base.shape[1]:
            raise PunctureLengthError(
                f"expected {base.shape[1]} puncture flags, got {len(self.punctured)}"
            )
        expected = {
            (r, c, s)
            for r, c in zip(*np.nonzero(base))
            for s in range(base[r, c])
        }
        expected = {(int(r), int(c), int(s)) for r, c, s in expected}
        got = set(self.edge_types)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise EdgeTypeLabelError(
                f"edge-type slots do not match base matrix (missing={missing[:5]}, extra={extra[:5]})"
            )
        labels = set(self.edge_types.values())
        if labels != set(range(1, len(labels) + 1)):
            raise EdgeTypeLabelError(f"edge-type labels must be dense 1..e, got {sorted(labels)}")
        object.__setattr__(self, "edge_types", dict(sorted(self.edge_types.items())))

    @property
    def n_rows(self) -> int:
        return self.base_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.base_matrix.shape[1]

    @property
    def n_edge_types(self) -> int:
        return len(set(self.edge_types.values()))

    @cached_property
    def slots(self) -> np.ndarray:
        """``(n_slots, 4)`` array of ``row, col, slot, edge_type`` in row-major order."""
        if not self.edge_types:
            return np.zeros((0, 4), dtype=np.int64)
        return np.array([(r, c, s, t) for (r, c, s), t in self.edge_types.items()], dtype=np.int64)

    def row_degrees(self) -> np.ndarray:
        return self.base_matrix.sum(axis=1)

    def col_degrees(self) -> np.ndarray:
        return self.base_matrix.sum(axis=0)

    def to_text(self) -> str:
        lines = [f"# {self.name}", f"{self.n_rows} {self.n_cols} {self.n_edge_types}"]
        lines += [" ".join(str(int(v)) for v in row) for row in self.base_matrix]
        if self.edge_types:
            lines.append(" ".join(f"({r},{c},{s})={t}" for (r, c, s), t in self.edge_types.items()))
        lines.append(" ".join("1" if p else "0" for p in self.punctured))
        return "\n".join(lines) + "\n"


def parse_protograph(text: str, name: str | None = None) -> Protograph:
    """Parse protograph file content.

    A leading ``# name`` comment sets the name when ``name`` is not given.
    Raises a :class:`ProtographFormatError` subclass naming the bad line.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            if name is None and raw.strip().startswith("#") and not lines:
                name = raw.strip().lstrip("#").strip() or None
            continue
        lines.append((lineno, body))
    if not lines:
        raise ProtographFormatError("empty protograph file")

    lineno, header = lines[0]
    try:
        rows, cols, e = (int(v) for v in header.split())
    except ValueError:
        raise ProtographFormatError("header must be 'rows cols e'", lineno) from None
    if rows <= 0 or cols <= 0 or e < 0:
        raise ProtographFormatError("rows and cols must be positive, e non-negative", lineno)

    if len(lines) < 1 + rows:
        raise RaggedMatrixError(f"expected {rows} matrix rows", lines[-1][0])
    base = np.zeros((rows, cols), dtype=np.int64)
    for r in range(rows):
        lineno, body = lines[1 + r]
        try:
            vals = [int(v) for v in body.split()]
        except ValueError:
            raise ProtographFormatError("non-integer matrix entry", lineno) from None
        if len(vals) != cols:
            raise RaggedMatrixError(f"row {r} has {len(vals)} entries, expected {cols}", lineno)
        if any(v < 0 for v in vals):
            raise NegativeEntryError(f"negative entry in row {r}", lineno)
        base[r] = vals

    rest = lines[1 + rows:]
    has_edges = bool(base.any())
    if has_edges:
        if not rest:
            raise EdgeTypeLabelError("missing edge-type line", lines[-1][0])
        (type_line, type_body), rest = rest[0], rest[1:]
        edge_types = _parse_assignments(type_body, base, e, type_line)
    else:
        edge_types = {}
        type_line = lines[rows][0]
    if e != len(set(edge_types.values())):
        raise EdgeTypeLabelError(
            f"header declares e={e} but {len(set(edge_types.values()))} labels are assigned", type_line
        )

    if len(rest) != 1:
        at = rest[1][0] if len(rest) > 1 else lines[-1][0]
        raise PunctureLengthError("expected exactly one puncture line after the edge types", at)
    p_line, p_body = rest[0]
    bits = p_body.split()
    if len(bits) != cols or any(b not in ("0", "1") for b in bits):
        raise PunctureLengthError(f"puncture vector must be {cols} bits of 0/1", p_line)
    punctured = tuple(b == "1" for b in bits)
    return Protograph(base, edge_types, punctured, name=name or "protograph")


def _parse_assignments(body: str, base: np.ndarray, e: int, lineno: int) -> dict:
    leftover = _ASSIGN.sub("", body).strip()
    if leftover:
        raise EdgeTypeLabelError(f"unparseable edge-type assignment near {leftover[:30]!r}", lineno)
    edge_types: dict = {}
    for m in _ASSIGN.finditer(body):
        r, c = int(m.group(1)), int(m.group(2))
        label = int(m.group(4))
        if r >= base.shape[0] or c >= base.shape[1] or base[r, c] == 0:
            raise EdgeTypeLabelError(f"assignment to empty position ({r},{c})", lineno)
        if not 1 <= label <= e:
            raise EdgeTypeLabelError(f"label {label} outside 1..{e}", lineno)
        slots = range(base[r, c]) if m.group(3) is None else [int(m.group(3))]
        for s in slots:
            if s >= base[r, c]:
                raise EdgeTypeLabelError(f"slot {s} out of range at ({r},{c})", lineno)
            if (r, c, s) in edge_types:
                raise EdgeTypeLabelError(f"duplicate label for slot ({r},{c},{s})", lineno)
            edge_types[(r, c, s)] = label
    for r, c in zip(*np.nonzero(base)):
        for s in range(base[r, c]):
            if (int(r), int(c), s) not in edge_types:
                raise EdgeTypeLabelError(f"missing label for slot ({r},{c},{s})", lineno)
    return edge_types


def load_protograph(path) -> Protograph:
    """Read a protograph file, or a bundled one via ``builtin:<name>``."""
    path = str(path)
    if path.startswith("builtin:"):
        from importlib.resources import files

        stem = path.split(":", 1)[1]
        text = files("metldpc.data").joinpath(f"{stem}.proto").read_text()
        return parse_protograph(text)
    with open(path) as fh:
        return parse_protograph(fh.read())
