import numpy as np
import pytest

from metldpc.channel import ChannelParams, esn0_to_sigma2, frame_rng, transmit_all_zero
from metldpc.code import lift_protograph
from metldpc.protograph import Protograph


def test_sigma2_values():
    assert esn0_to_sigma2(0.0) == 0.5
    assert esn0_to_sigma2(-20.0) == pytest.approx(50.0, rel=1e-15)
    vals = [esn0_to_sigma2(x) for x in np.linspace(-30, 60, 50)]
    assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-6


def test_sigma2_rejects_non_finite():
    with pytest.raises(ValueError):
        esn0_to_sigma2(float("inf"))


def test_llr_moments(small_met_code):
    params = ChannelParams(-3.0)
    x = np.concatenate([transmit_all_zero(small_met_code, params, frame_rng(11, k)) for k in range(200)])
    s2 = params.sigma2
    # 40000 draws: 5 standard errors on the mean and on the variance
    n = len(x)
    assert abs(x.mean() - 2 / s2) < 5 * np.sqrt(4 / s2 / n)
    assert abs(x.var() - 4 / s2) < 5 * (4 / s2) * np.sqrt(2 / n)


def test_high_snr_all_positive(small_met_code):
    llr = transmit_all_zero(small_met_code, ChannelParams(40.0), frame_rng(0, 0))
    assert np.all(llr > 0)


def test_punctured_positions_are_zero():
    proto = Protograph(np.array([[1, 1, 1]]), {(0, c, 0): c + 1 for c in range(3)}, [False, True, False])
    code = lift_protograph(proto, 5)
    llr = transmit_all_zero(code, ChannelParams(0.0), frame_rng(1, 2))
    assert np.all(llr[5:10] == 0.0) and np.all(llr[:5] != 0.0)


def test_frame_streams_are_keyed():
    a = frame_rng(3, 7).standard_normal(4)
    np.testing.assert_array_equal(a, frame_rng(3, 7).standard_normal(4))
    assert not np.array_equal(a, frame_rng(3, 8).standard_normal(4))
    assert not np.array_equal(a, frame_rng(4, 7).standard_normal(4))
