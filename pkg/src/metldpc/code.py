"""Multi-edge-type LDPC codes lifted from protographs."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .protograph import Protograph, parse_protograph


class LiftingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetLdpcCode:
    """Lifted parity-check matrix whose edges carry protograph edge types.

    Edges are stored sorted by check node, then variable node; the position of
    an edge in these arrays is its edge id everywhere in the package.
    """

    n: int
    m: int
    z: int
    cn: np.ndarray
    vn: np.ndarray
    edge_type: np.ndarray
    punctured: np.ndarray
    name: str = "code"
    protograph: Protograph | None = None

    def __post_init__(self):
        order = np.lexsort((self.vn, self.cn))
        for attr in ("cn", "vn", "edge_type"):
            arr = np.asarray(getattr(self, attr), dtype=np.int64)[order]
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        punct = np.asarray(self.punctured, dtype=bool).copy()
        punct.setflags(write=False)
        object.__setattr__(self, "punctured", punct)
        if punct.shape != (self.n,):
            raise ValueError("punctured mask must have length n")

    @property
    def rate(self) -> float:
        return (self.n - self.m) / self.n

    @property
    def n_edges(self) -> int:
        return len(self.cn)

    @cached_property
    def n_edge_types(self) -> int:
        if self.protograph is not None:
            return self.protograph.n_edge_types
        return int(self.edge_type.max()) if self.n_edges else 0

    @cached_property
    def cn_ptr(self) -> np.ndarray:
        """CSR row pointer: edges of check ``j`` are ``cn_ptr[j]:cn_ptr[j+1]``."""
        return np.concatenate([[0], np.cumsum(np.bincount(self.cn, minlength=self.m))]).astype(np.int64)

    @cached_property
    def vn_ptr(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(np.bincount(self.vn, minlength=self.n))]).astype(np.int64)

    @cached_property
    def vn_edges(self) -> np.ndarray:
        """Edge ids grouped by variable node (pairs with :attr:`vn_ptr`)."""
        return np.argsort(self.vn, kind="stable").astype(np.int64)

    def cn_degrees(self) -> np.ndarray:
        return np.diff(self.cn_ptr)

    def vn_degrees(self) -> np.ndarray:
        return np.diff(self.vn_ptr)

    def parity_check_matrix(self) -> sp.csr_matrix:
        data = np.ones(self.n_edges, dtype=np.uint8)
        return sp.csr_matrix((data, (self.cn, self.vn)), shape=(self.m, self.n))

    def syndrome(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        return np.bincount(self.cn, weights=bits[self.vn], minlength=self.m).astype(np.int64) % 2


def _count_four_cycles(edge: tuple, assigned: list, z: int) -> int:
    """Count length-4 cycles closed by ``edge`` against already placed edges.

    A walk r1-c1-r2-c2-r1 over base edges lifts to a cycle when the
    alternating shift sum vanishes mod z.
    """
    r, c, s = edge
    by_col: dict = {}
    by_row: dict = {}
    for k, (rr, cc, ss) in enumerate(assigned):
        by_col.setdefault(cc, []).append((k, rr, ss))
        by_row.setdefault(rr, []).append((k, cc, ss))
    count = 0
    # new edge e1=(r,c,s); e2 in column c at row r2; e3 in row r2 at column c2; e4 in row r at column c2
    for k2, r2, s2 in by_col.get(c, []):
        for k3, c2, s3 in by_row.get(r2, []):
            if k3 == k2:
                continue
            for k4, c4, s4 in by_row.get(r, []):
                if c4 != c2 or k4 == k3 or k4 == k2:
                    continue
                if (s - s2 + s3 - s4) % z == 0:
                    count += 1
    return count


def lift_protograph(proto: Protograph, z: int, seed: int = 0, girth_retries: int = 0,
                    name: str | None = None) -> MetLdpcCode:
    """Quasi-cyclic lifting with seeded circulant shifts.

    Every parallel-edge slot at a protograph position gets its own shift; the
    shifts of one position are distinct. With ``girth_retries > 0`` each shift
    is re-drawn up to that many times to avoid closing a 4-cycle, and the last
    draw is kept if none succeeds.
    """
    z = int(z)
    if z <= 0:
        raise LiftingError(f"lifting factor must be positive, got {z}")
    max_entry = int(proto.base_matrix.max()) if proto.base_matrix.size else 0
    if z < max_entry:
        raise LiftingError(
            f"lifting factor z={z} is below the largest base entry {max_entry}; "
            "parallel edges would share a circulant shift"
        )
    rng = np.random.default_rng(seed)
    slots = proto.slots
    shifts = np.zeros(len(slots), dtype=np.int64)
    assigned: list = []
    used: dict = {}
    for k, (r, c, s, _t) in enumerate(slots):
        taken = used.setdefault((r, c), set())
        free = np.array([v for v in range(z) if v not in taken]) if len(taken) else None
        for attempt in range(girth_retries + 1):
            shift = int(rng.integers(z)) if free is None else int(free[rng.integers(len(free))])
            if girth_retries == 0 or _count_four_cycles((r, c, shift), assigned, z) == 0:
                break
        taken.add(shift)
        shifts[k] = shift
        assigned.append((int(r), int(c), shift))

    offs = np.arange(z, dtype=np.int64)
    cn = (slots[:, 0, None] * z + offs[None, :]).ravel()
    vn = (slots[:, 1, None] * z + (offs[None, :] + shifts[:, None]) % z).ravel()
    etype = np.repeat(slots[:, 3], z)
    punctured = np.repeat(np.asarray(proto.punctured, dtype=bool), z)
    return MetLdpcCode(
        n=proto.n_cols * z,
        m=proto.n_rows * z,
        z=z,
        cn=cn,
        vn=vn,
        edge_type=etype,
        punctured=punctured,
        name=name or proto.name,
        protograph=proto,
    )


@dataclass(frozen=True)
class CodeStats:
    vn_degree_histogram: dict
    cn_degree_histogram: dict
    frac_cns_touching_deg1_vns: float


def code_stats(code: MetLdpcCode) -> CodeStats:
    vdeg = code.vn_degrees()
    cdeg = code.cn_degrees()
    deg1 = vdeg[code.vn] == 1
    touching = np.zeros(code.m, dtype=bool)
    touching[code.cn[deg1]] = True
    frac = float(touching.mean()) if code.m else 0.0
    return CodeStats(
        vn_degree_histogram=dict(sorted(Counter(vdeg.tolist()).items())),
        cn_degree_histogram=dict(sorted(Counter(cdeg.tolist()).items())),
        frac_cns_touching_deg1_vns=frac,
    )


def write_code(code: MetLdpcCode, prefix) -> tuple:
    """Write ``<prefix>.csv`` (edge list) and ``<prefix>.json`` (header)."""
    prefix = Path(prefix)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cn", "vn", "edge_type"])
        w.writerows(zip(code.cn.tolist(), code.vn.tolist(), code.edge_type.tolist()))
    header = {
        "name": code.name,
        "n": code.n,
        "m": code.m,
        "z": code.z,
        "rate": code.rate,
        "n_edges": code.n_edges,
        "n_edge_types": code.n_edge_types,
        "punctured": np.flatnonzero(code.punctured).tolist(),
        "edges_file": csv_path.name,
        "protograph": code.protograph.to_text() if code.protograph is not None else None,
    }
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=2)
        fh.write("\n")
    return csv_path, json_path


def read_code(json_path) -> MetLdpcCode:
    json_path = Path(json_path)
    with open(json_path) as fh:
        header = json.load(fh)
    edges = np.loadtxt(json_path.parent / header["edges_file"], delimiter=",", skiprows=1,
                       dtype=np.int64, ndmin=2)
    punctured = np.zeros(header["n"], dtype=bool)
    punctured[header["punctured"]] = True
    proto = parse_protograph(header["protograph"]) if header.get("protograph") else None
    code = MetLdpcCode(
        n=header["n"], m=header["m"], z=header["z"],
        cn=edges[:, 0], vn=edges[:, 1], edge_type=edges[:, 2],
        punctured=punctured, name=header["name"], protograph=proto,
    )
    if code.n_edges != header["n_edges"]:
        raise ValueError(f"{json_path}: edge count mismatch")
    return code
