import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metldpc.code import LiftingError, code_stats, lift_protograph, read_code, write_code
from metldpc.protograph import Protograph, load_protograph


@st.composite
def protographs(draw):
    rows = draw(st.integers(1, 4))
    cols = draw(st.integers(1, 5))
    base = np.array(draw(st.lists(st.lists(st.integers(0, 3), min_size=cols, max_size=cols),
                                  min_size=rows, max_size=rows)))
    slots = [(r, c, s) for r in range(rows) for c in range(cols) for s in range(base[r, c])]
    if slots:
        labels = draw(st.lists(st.integers(1, len(slots)), min_size=len(slots), max_size=len(slots)))
        dense = {v: k + 1 for k, v in enumerate(sorted(set(labels)))}
        types = {sl: dense[v] for sl, v in zip(slots, labels)}
    else:
        types = {}
    punct = draw(st.lists(st.booleans(), min_size=cols, max_size=cols))
    return Protograph(base, types, punct)


@settings(max_examples=60, deadline=None)
@given(protographs(), st.integers(3, 9), st.integers(0, 2**31))
def test_lifting_invariants(proto, z, seed):
    code = lift_protograph(proto, z, seed=seed)
    assert code.n == z * proto.n_cols and code.m == z * proto.n_rows
    np.testing.assert_array_equal(code.cn_degrees(), np.repeat(proto.row_degrees(), z))
    np.testing.assert_array_equal(code.vn_degrees(), np.repeat(proto.col_degrees(), z))
    # every lifted edge inherits its parent slot's label
    parent_row, parent_col = code.cn // z, code.vn // z
    labels = {(r, c): set() for r, c in zip(parent_row.tolist(), parent_col.tolist())}
    for r, c, t in zip(parent_row.tolist(), parent_col.tolist(), code.edge_type.tolist()):
        labels[(r, c)].add(t)
    for (r, c), ts in labels.items():
        assert ts == {proto.edge_types[(r, c, s)] for s in range(proto.base_matrix[r, c])}
    # edge-type partition sizes
    for t in range(1, proto.n_edge_types + 1):
        mult = sum(1 for v in proto.edge_types.values() if v == t)
        assert np.count_nonzero(code.edge_type == t) == z * mult
    np.testing.assert_array_equal(code.punctured, np.repeat(proto.punctured, z))
    # no duplicate (cn, vn) pair from parallel slots
    pairs = set(zip(code.cn.tolist(), code.vn.tolist()))
    assert len(pairs) == code.n_edges
    assert code.rate == (code.n - code.m) / code.n


def test_determinism(small_met_proto):
    a = lift_protograph(small_met_proto, 17, seed=5)
    b = lift_protograph(small_met_proto, 17, seed=5)
    c = lift_protograph(small_met_proto, 17, seed=6)
    np.testing.assert_array_equal(a.vn, b.vn)
    assert not np.array_equal(a.vn, c.vn)


def test_identity_lift():
    base = np.array([[1, 0, 1, 1], [0, 1, 1, 0]])
    types = {(0, 0, 0): 1, (0, 2, 0): 2, (0, 3, 0): 3, (1, 1, 0): 4, (1, 2, 0): 5}
    code = lift_protograph(Protograph(base, types, [False] * 4), 1, seed=7)
    np.testing.assert_array_equal(code.parity_check_matrix().toarray(), base)


def test_lift_errors(small_met_proto):
    with pytest.raises(LiftingError, match="below the largest base entry"):
        lift_protograph(small_met_proto, 1)
    with pytest.raises(LiftingError, match="positive"):
        lift_protograph(small_met_proto, 0)


def test_girth_retries_reduce_four_cycles():
    proto = Protograph(np.ones((3, 6), dtype=int), {(r, c, 0): 1 + (r > 0) for r in range(3) for c in range(6)},
                       [False] * 6)

    def four_cycles(code):
        H = code.parity_check_matrix().astype(np.int64)
        overlap = (H @ H.T).toarray()
        np.fill_diagonal(overlap, 0)
        return int((overlap * (overlap - 1) // 2).sum() // 2)

    plain = lift_protograph(proto, 31, seed=2)
    tuned = lift_protograph(proto, 31, seed=2, girth_retries=50)
    assert four_cycles(tuned) == 0 <= four_cycles(plain)


def test_stats_trivial_cases():
    no_deg1 = lift_protograph(Protograph(np.array([[2, 2]]), {(0, 0, 0): 1, (0, 0, 1): 1, (0, 1, 0): 2,
                                                              (0, 1, 1): 2}, [False, False]), 4)
    assert code_stats(no_deg1).frac_cns_touching_deg1_vns == 0.0
    single = lift_protograph(Protograph(np.array([[1]]), {(0, 0, 0): 1}, [False]), 1)
    assert code_stats(single).frac_cns_touching_deg1_vns == 1.0


def test_stats_histograms(small_met_code):
    s = code_stats(small_met_code)
    assert sum(s.vn_degree_histogram.values()) == small_met_code.n
    assert sum(s.cn_degree_histogram.values()) == small_met_code.m


def test_placeholder_scale():
    """Rate 0.01 placeholder lifted to length 998400."""
    code = lift_protograph(load_protograph("builtin:placeholder_r001"), 9984, seed=0)
    assert code.n == 998400
    assert code.rate == pytest.approx(0.01, abs=1e-12)
    assert code.n_edge_types == 11
    assert code_stats(code).frac_cns_touching_deg1_vns == pytest.approx(98 / 99)


def test_desk_code_shape():
    code = lift_protograph(load_protograph("builtin:desk_r002"), 200, seed=1)
    assert code.n == 20000 and code.rate == pytest.approx(0.02)


def test_write_read_round_trip(tmp_path, small_met_code):
    write_code(small_met_code, tmp_path / "c")
    back = read_code(tmp_path / "c.json")
    for attr in ("cn", "vn", "edge_type", "punctured"):
        np.testing.assert_array_equal(getattr(back, attr), getattr(small_met_code, attr))
    assert (back.n, back.m, back.z, back.name) == (small_met_code.n, small_met_code.m, 40, "small-met")
    assert back.protograph.edge_types == small_met_code.protograph.edge_types
    header = (tmp_path / "c.csv").read_text().splitlines()[0]
    assert header == "cn,vn,edge_type"


def test_all_zero_word_is_a_codeword(small_met_code):
    assert not small_met_code.syndrome(np.zeros(small_met_code.n, dtype=np.uint8)).any()
