import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metldpc.kernels import (
    approx_box_plus,
    box_plus,
    cn_update_box_plus,
    cn_update_min_sum,
    cn_update_tanh_product,
    cn_update_tanh_scaled,
    correction_term,
    correction_term_approx,
    decompose,
    tanh_product,
)

# high-precision oracle values
BOX_PLUS_2_2 = 1.3250027473578644309
BOX_PLUS_M3_5 = -2.8734073953299232724
APPROX_2_2 = 1.5231883119115297762
APPROX_GAP_01_02 = 8.2150675393577273412e-6

llrs = st.floats(-30, 30, allow_nan=False)


def mp_box_plus(a, b):
    a, b = mp.mpf(a), mp.mpf(b)
    return 2 * mp.atanh(mp.tanh(a / 2) * mp.tanh(b / 2))


def test_decompose():
    a, b = decompose(np.array([-2.5, 0.0, 3.0]))
    np.testing.assert_array_equal(a, [-1, 1, 1])
    np.testing.assert_array_equal(b, [2.5, 0, 3])


def test_box_plus_values():
    assert box_plus(2.0, 2.0) == pytest.approx(BOX_PLUS_2_2, abs=1e-14)
    assert box_plus(-3.0, 5.0) == pytest.approx(BOX_PLUS_M3_5, abs=1e-14)
    assert box_plus(-3.0, 5.0) == pytest.approx(-(3.0 + float(correction_term(3.0, 5.0))))
    assert box_plus(7.3, 0.0) == 0.0


def test_box_plus_matches_mpmath():
    rng = np.random.default_rng(0)
    mp.mp.dps = 30
    for a, b in rng.uniform(-20, 20, size=(200, 2)):
        assert float(box_plus(a, b)) == pytest.approx(float(mp_box_plus(a, b)), rel=1e-13, abs=1e-15)


@settings(max_examples=300)
@given(llrs, llrs)
def test_box_plus_algebra(a, b):
    ab = float(box_plus(a, b))
    assert ab == float(box_plus(b, a))
    assert abs(ab) <= min(abs(a), abs(b)) + 1e-15
    assert float(box_plus(a, 0.0)) == 0.0


def test_no_overflow_for_large_inputs():
    out = box_plus(np.array([1e300, -700.0]), np.array([1e300, 800.0]))
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(1e300) and out[1] == pytest.approx(-700.0)


def test_approx_box_plus_values():
    assert approx_box_plus(2.0, 2.0) == pytest.approx(APPROX_2_2, abs=1e-14)
    assert approx_box_plus(5.0, 0.0) == 0.0
    assert approx_box_plus(-1.5, 60.0) == pytest.approx(-1.5, abs=1e-15)


def test_correction_term_approx():
    assert correction_term_approx(0.0, 3.0) == 0.0
    assert abs(correction_term_approx(1.0, 800.0)) < 1e-300
    gap = abs(correction_term_approx(0.1, 0.2) - correction_term(0.1, 0.2))
    assert gap == pytest.approx(APPROX_GAP_01_02, rel=1e-9)
    with pytest.raises(ValueError):
        correction_term_approx(2.0, 1.0)
    with pytest.raises(ValueError):
        correction_term_approx(-1.0, 1.0)


def test_approx_is_min_times_tanh():
    b1, b2 = 0.7, 1.9
    direct = b1 + float(correction_term_approx(b1, b2))
    assert direct == pytest.approx(b1 * np.tanh(b2 / 2), rel=1e-14)


def test_tanh_product_zero_absorbs():
    assert tanh_product([0.0, 4.0, -2.0]) == 0.0


@pytest.mark.parametrize("d", range(2, 13))
def test_forward_backward_matches_tanh_rule(d):
    rng = np.random.default_rng(d)
    for _ in range(30):
        x = rng.uniform(0.05, 15, d) * rng.choice([-1, 1], d)
        np.testing.assert_allclose(cn_update_box_plus(x), cn_update_tanh_product(x), rtol=0, atol=1e-9)


def test_degree_one_checks_emit_zero():
    for f in (cn_update_box_plus, cn_update_tanh_product, cn_update_tanh_scaled, cn_update_min_sum):
        np.testing.assert_array_equal(f([3.0]), [0.0])


def test_tanh_scaled_degree_two_passthrough():
    np.testing.assert_array_equal(cn_update_tanh_scaled([2.5, -4.0]), [-4.0, 2.5])


def test_tanh_scaled_zero_input():
    out = cn_update_tanh_scaled([1.0, 0.0, -3.0, 2.0])
    assert out[0] == out[2] == out[3] == 0.0


def test_tanh_scaled_direct_oracle():
    x = np.array([1.2, -0.4, 3.0, -2.2])
    t = lambda v: np.tanh(abs(v) / 2)  # noqa: E731
    expected = [
        0.4 * t(3.0) * t(2.2),           # i=0: others -0.4, 3.0, -2.2
        -(1.2 * t(3.0) * t(2.2)),        # i=1: others 1.2, 3.0, -2.2
        0.4 * t(1.2) * t(2.2),           # i=2: others 1.2, -0.4, -2.2
        -(0.4 * t(1.2) * t(3.0)),        # i=3: others 1.2, -0.4, 3.0
    ]
    np.testing.assert_allclose(cn_update_tanh_scaled(x), expected, rtol=1e-15)


def test_tanh_scaled_degree_three_equals_pairwise_approx():
    x = np.array([0.9, -2.0, 3.3])
    out = cn_update_tanh_scaled(x)
    for i in range(3):
        a, b = np.delete(x, i)
        assert out[i] == pytest.approx(float(approx_box_plus(a, b)), rel=1e-15)


def test_min_sum_scaling():
    out = cn_update_min_sum([1.0, -2.0, 3.0], factor=0.75)
    np.testing.assert_allclose(out, [-1.5, 0.75, -0.75])
