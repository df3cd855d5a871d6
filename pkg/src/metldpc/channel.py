"""BI-AWGN channel front end for all-zero-codeword simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def esn0_to_sigma2(esn0_db: float) -> float:
    """Noise variance ``N0 / 2`` for unit-energy BPSK at the given Es/N0."""
    if not math.isfinite(esn0_db):
        raise ValueError("esn0_db must be finite")
    return 1.0 / (2.0 * 10.0 ** (esn0_db / 10.0))


@dataclass(frozen=True)
class ChannelParams:
    esn0_db: float

    @property
    def sigma2(self) -> float:
        return esn0_to_sigma2(self.esn0_db)

    @property
    def llr_mean(self) -> float:
        """Mean of the channel LLR ``2y / sigma2`` when ``+1`` is sent."""
        return 2.0 / self.sigma2


def frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    """Independent generator for one frame, fixed by ``(seed, frame_index)``.

    Streams do not depend on which worker draws them or in which order.
    """
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, frame_index]))


def transmit_all_zero(code, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Channel LLRs for the all-zero codeword sent as BPSK ``+1``.

    Punctured positions get LLR 0 exactly. Positive LLRs favour bit 0.
    """
    sigma2 = params.sigma2
    y = 1.0 + math.sqrt(sigma2) * rng.standard_normal(code.n)
    llr = 2.0 * y / sigma2
    llr[code.punctured] = 0.0
    return llr
