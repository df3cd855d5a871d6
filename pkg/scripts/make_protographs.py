#!/usr/bin/env python3
"""Regenerate the bundled placeholder protographs in src/metldpc/data/.

All three follow the usual low-rate multi-edge-type layout: a few
high-degree "core" variable nodes joined by core checks, plus one degree-1
variable node per low-degree check. They stand in for the published
TBP-LDPC base matrices, which are not reproduced here; drop a genuine
protograph file next to these to use it instead.
"""

from pathlib import Path

import numpy as np

from metldpc.protograph import Protograph

OUT = Path(__file__).resolve().parents[1] / "src" / "metldpc" / "data"


def _build(name, n_core, low_rows, core_rows):
    """``low_rows``: list of ({core col: multiplicity}, {core col: label}, deg1 label).
    ``core_rows``: list of ({core col: multiplicity}, {core col: label})."""
    n_low = len(low_rows)
    base = np.zeros((n_low + len(core_rows), n_core + n_low), dtype=int)
    types = {}
    for r, (mult, labels, d1_label) in enumerate(low_rows):
        for c, k in mult.items():
            base[r, c] = k
            for s in range(k):
                types[(r, c, s)] = labels[c]
        base[r, n_core + r] = 1
        types[(r, n_core + r, 0)] = d1_label
    for j, (mult, labels) in enumerate(core_rows):
        r = n_low + j
        for c, k in mult.items():
            base[r, c] = k
            for s in range(k):
                types[(r, c, s)] = labels[c]
    return Protograph(base, types, [False] * base.shape[1], name=name)


def desk_r002():
    low = []
    for r in range(96):
        a, b = (0, 2) if r < 48 else (1, 3)
        low.append(({a: 1, b: 1}, {a: 3, b: 4}, 5))
    lab = {0: 1, 1: 1, 2: 2, 3: 2}
    core = [({0: 2, 1: 1, 2: 2, 3: 1}, lab), ({0: 1, 1: 2, 2: 1, 3: 2}, lab)]
    return _build("desk-r002", 4, low, core)


def placeholder_r001():
    low = []
    for r in range(98):
        if r < 40:
            low.append(({0: 1, 1: 1}, {0: 3, 1: 4}, 5))
        elif r < 60:
            low.append(({0: 2}, {0: 6}, 7))
        elif r < 80:
            low.append(({1: 2}, {1: 8}, 9))
        else:
            low.append(({0: 1, 1: 2}, {0: 10, 1: 10}, 11))
    core = [({0: 3, 1: 3}, {0: 1, 1: 2})]
    return _build("placeholder-r001", 2, low, core)


def placeholder_r01():
    low = []
    for r in range(32):
        a = r % 4
        if r < 16:
            b = 4 + (r // 4) % 4
            low.append(({a: 1, b: 1}, {a: 3, b: 4}, 5))
        else:
            b, c = 4 + r % 4, 4 + (r + 1) % 4
            low.append(({a: 1, b: 1, c: 1}, {a: 6, b: 7, c: 7}, 8))
    lab = {c: (1 if c < 4 else 2) for c in range(8)}
    core = []
    for cols in ([0, 1, 2, 3, 4, 5], [2, 3, 4, 5, 6, 7], [0, 1, 4, 5, 6, 7], [0, 1, 2, 3, 6, 7]):
        core.append(({c: 1 for c in cols}, {c: lab[c] for c in cols}))
    return _build("placeholder-r01", 8, low, core)


if __name__ == "__main__":
    for fn in (desk_r002, placeholder_r001, placeholder_r01):
        proto = fn()
        path = OUT / f"{proto.name.replace('-', '_')}.proto"
        path.write_text(proto.to_text())
        print(path, proto.n_rows, proto.n_cols, proto.n_edge_types)
