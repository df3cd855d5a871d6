"""Binary and CSV serialization of compressed LUTs.

Binary layout, all little-endian::

    magic        8 bytes  b"METLUT\\0\\0"
    version      uint16
    T, e, Q, K   uint32 x 4
    mode         uint8    0 = normalized, 1 = paper-literal
    esn0_db      float64
    grid_policy  uint16 length + utf-8 bytes
    source       uint16 length + utf-8 bytes
    grid         Q x float64
    cluster_rows K x Q x float64 (row-major)
    index_map    T x e x uint32 (row-major, 0-based)
"""

from __future__ import annotations

import csv
import struct

import numpy as np

from .lut import MODES, CompressedLut

MAGIC = b"METLUT\0\0"
VERSION = 1
_HEAD = struct.Struct("<8sH4IBd")


class LutFormatError(ValueError):
    pass


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<H", len(b)) + b


def lut_to_bytes(lut: CompressedLut) -> bytes:
    head = _HEAD.pack(MAGIC, VERSION, lut.n_iter, lut.n_edge_types, lut.n_levels, lut.n_clusters,
                      MODES.index(lut.mode), float(lut.esn0_db))
    return b"".join([
        head,
        _pack_str(lut.grid_policy),
        _pack_str(lut.source),
        lut.grid.astype("<f8").tobytes(),
        lut.cluster_rows.astype("<f8").tobytes(),
        lut.index_map.astype("<u4").tobytes(),
    ])


def lut_from_bytes(data: bytes) -> CompressedLut:
    if len(data) < _HEAD.size:
        raise LutFormatError("truncated LUT header")
    magic, version, T, e, Q, K, mode, esn0 = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise LutFormatError("not a LUT file (bad magic)")
    if version != VERSION:
        raise LutFormatError(f"unsupported LUT version {version}, expected {VERSION}")
    if mode >= len(MODES):
        raise LutFormatError(f"unknown normalization mode code {mode}")
    pos = _HEAD.size
    strings = []
    for _ in range(2):
        if pos + 2 > len(data):
            raise LutFormatError("truncated LUT header strings")
        (n,) = struct.unpack_from("<H", data, pos)
        pos += 2
        if pos + n > len(data):
            raise LutFormatError("truncated LUT header strings")
        strings.append(data[pos:pos + n].decode("utf-8"))
        pos += n
    need = 8 * Q + 8 * K * Q + 4 * T * e
    if len(data) - pos != need:
        raise LutFormatError(
            f"LUT body has {len(data) - pos} bytes, dimensions T={T} e={e} Q={Q} K={K} need {need}"
        )
    grid = np.frombuffer(data, "<f8", Q, pos).astype(np.float64)
    pos += 8 * Q
    rows = np.frombuffer(data, "<f8", K * Q, pos).astype(np.float64).reshape(K, Q)
    pos += 8 * K * Q
    imap = np.frombuffer(data, "<u4", T * e, pos).astype(np.int64).reshape(T, e)
    try:
        return CompressedLut(rows, imap, grid, MODES[mode], strings[0], strings[1], esn0)
    except ValueError as exc:
        raise LutFormatError(str(exc)) from None


def write_lut(lut: CompressedLut, path) -> None:
    with open(path, "wb") as fh:
        fh.write(lut_to_bytes(lut))


def read_lut(path) -> CompressedLut:
    with open(path, "rb") as fh:
        return lut_from_bytes(fh.read())


def write_lut_csv(lut: CompressedLut, path) -> None:
    """Human-readable export: grid, centroid rows and the index map."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["section", "a", "b", "values"])
        w.writerow(["grid", "", "", " ".join(repr(float(g)) for g in lut.grid)])
        for k, row in enumerate(lut.cluster_rows):
            w.writerow(["cluster", k, "", " ".join(repr(float(v)) for v in row)])
        for t in range(lut.n_iter):
            for i in range(lut.n_edge_types):
                w.writerow(["index", t + 1, i + 1, int(lut.index_map[t, i])])
