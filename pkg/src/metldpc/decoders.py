"""Flooding belief-propagation decoders for edge-typed LDPC codes.

Three check-node rules share one schedule: exact sum-product (SPA), scaled
min-sum (MSA) and iteration-dependent scaled min-sum (ID-MSA), whose
scaling comes from a :class:`~metldpc.analysis.lut.CompressedLut`.

The functional entry points (:func:`spa_decode`, :func:`msa_decode`,
:func:`id_msa_decode`) decode one frame. The estimator classes wrap them
with scikit-learn conventions: hyper-parameters in ``__init__``, ``fit``
binds a code (and builds a LUT when needed), ``predict`` maps a matrix of
channel LLRs to hard decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _loops
from .analysis.lut import CompressedLut
from .code import MetLdpcCode
from .validation import check_code, check_llr, check_llr_matrix


class LutMismatchError(ValueError):
    """The LUT does not cover the code's edge types or the iteration budget."""


@dataclass
class DecodeResult:
    success: bool
    iterations_used: int
    hard_decision: np.ndarray
    lookup_count: int = 0
    posterior: np.ndarray | None = field(default=None, repr=False)
    trace: list | None = field(default=None, repr=False)


def _decode(code: MetLdpcCode, llr, max_iters: int, cn_step, trace: bool = False) -> DecodeResult:
    code = check_code(code)
    llr = check_llr(llr, code.n).copy()
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    llr[code.punctured] = 0.0
    E = code.n_edges
    v2c = np.empty(E)
    c2v = np.zeros(E)
    post = np.empty(code.n)
    hard = np.zeros(code.n, dtype=np.int64)
    _loops.init_v2c(llr, code.vn, v2c)
    history = [] if trace else None
    lookups = 0
    success = False
    t = 0
    for t in range(1, max_iters + 1):
        lookups += cn_step(t, v2c, c2v)
        _loops.vn_update(llr, c2v, code.vn_ptr, code.vn_edges, v2c, post)
        zeros = _loops.hard_decision(post, hard)
        if trace:
            history.append((c2v.copy(), v2c.copy()))
        # a zero posterior is an erasure, never a decoded bit
        if zeros == 0 and _loops.unsatisfied_checks(hard, code.cn_ptr, code.vn) == 0:
            success = True
            break
    return DecodeResult(success, t, hard.astype(np.uint8), int(lookups), post, history)


def spa_decode(code, llr, max_iters: int = 500, trace: bool = False) -> DecodeResult:
    """Sum-product decoding with exact forward-backward box-plus check updates."""
    dmax = int(code.cn_degrees().max()) if code.m else 1
    fwd = np.empty(max(dmax, 2))
    bwd = np.empty(max(dmax, 2))

    def step(t, v2c, c2v):
        _loops.cn_spa(v2c, code.cn_ptr, c2v, fwd, bwd)
        return 0

    return _decode(code, llr, max_iters, step, trace)


def msa_decode(code, llr, max_iters: int = 500, factor: float = 0.75, trace: bool = False) -> DecodeResult:
    """Min-sum decoding with a fixed scaling ``factor`` in ``(0, 1]``."""
    factor = float(factor)
    if not 0.0 < factor <= 1.0:
        raise ValueError(f"min-sum factor must be in (0, 1], got {factor}")

    def step(t, v2c, c2v):
        _loops.cn_min_sum(v2c, code.cn_ptr, c2v, factor)
        return 0

    return _decode(code, llr, max_iters, step, trace)


def check_lut_compatible(code, lut: CompressedLut, max_iters: int) -> None:
    if lut.n_edge_types != code.n_edge_types:
        raise LutMismatchError(
            f"LUT has {lut.n_edge_types} edge types, code {code.name!r} has {code.n_edge_types}"
        )
    if lut.n_iter < max_iters:
        raise LutMismatchError(f"LUT covers {lut.n_iter} iterations, decoder runs {max_iters}")


def id_msa_decode(code, llr, max_iters: int, lut: CompressedLut, trace: bool = False) -> DecodeResult:
    """Iteration-dependent scaled min-sum decoding.

    Each check output is the sign product times the smallest other magnitude
    times ``c[t, type(i)](second smallest)``, one table lookup per message of
    checks with degree >= 3. Degree-2 checks pass messages through unscaled.
    """
    check_lut_compatible(code, lut, max_iters)
    tidx = (code.edge_type - 1).astype(np.int64)
    rows = lut.cluster_rows
    mids = np.ascontiguousarray(lut.midpoints)
    imap = lut.index_map

    def step(t, v2c, c2v):
        return _loops.cn_id_min_sum(v2c, code.cn_ptr, tidx, imap[t - 1], rows, mids, c2v)

    return _decode(code, llr, max_iters, step, trace)


class _DecoderBase(BaseEstimator):
    def fit(self, X, y=None):
        """Bind the decoder to a code ``X``."""
        self.code_ = check_code(X)
        self.n_features_in_ = self.code_.n
        return self

    def decode(self, llr, trace: bool = False) -> DecodeResult:
        check_is_fitted(self, "code_")
        return self._decode_one(llr, self.max_iter, trace)

    def _decode_one(self, llr, max_iters, trace=False) -> DecodeResult:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        """Hard decisions for each row of channel LLRs."""
        check_is_fitted(self, "code_")
        X = check_llr_matrix(X, self.code_.n)
        return np.stack([self._decode_one(row, self.max_iter).hard_decision for row in X])

    def score(self, X, y=None) -> float:
        """Fraction of frames whose hard decision satisfies every check."""
        check_is_fitted(self, "code_")
        X = check_llr_matrix(X, self.code_.n)
        return float(np.mean([self._decode_one(row, self.max_iter).success for row in X]))


class SumProductDecoder(_DecoderBase):
    kind = "spa"

    def __init__(self, max_iter: int = 500):
        self.max_iter = max_iter

    def _decode_one(self, llr, max_iters, trace=False):
        return spa_decode(self.code_, llr, max_iters, trace)


class MinSumDecoder(_DecoderBase):
    kind = "msa"

    def __init__(self, factor: float = 0.75, max_iter: int = 500):
        self.factor = factor
        self.max_iter = max_iter

    def fit(self, X, y=None):
        if not 0.0 < float(self.factor) <= 1.0:
            raise ValueError(f"min-sum factor must be in (0, 1], got {self.factor}")
        return super().fit(X, y)

    def _decode_one(self, llr, max_iters, trace=False):
        return msa_decode(self.code_, llr, max_iters, self.factor, trace)


class IdMinSumDecoder(_DecoderBase):
    """Iteration-dependent scaled min-sum.

    Parameters
    ----------
    lut : CompressedLut, optional
        Scaling table. When omitted, ``fit`` builds one from the code's
        protograph at ``esn0_db`` with the remaining parameters.
    """

    kind = "idmsa"

    def __init__(self, lut=None, max_iter: int = 500, esn0_db=None, n_levels: int = 32,
                 n_clusters: int = 81, mode: str = "normalized",
                 grid_policy: str = "pooled-quantile", random_state: int = 0):
        self.lut = lut
        self.max_iter = max_iter
        self.esn0_db = esn0_db
        self.n_levels = n_levels
        self.n_clusters = n_clusters
        self.mode = mode
        self.grid_policy = grid_policy
        self.random_state = random_state

    def fit(self, X, y=None):
        super().fit(X, y)
        if self.lut is not None:
            self.lut_ = self.lut
        else:
            from .analysis.builder import ScalingLutBuilder

            if self.esn0_db is None or self.code_.protograph is None:
                raise ValueError("building a LUT needs esn0_db and a code with its protograph")
            builder = ScalingLutBuilder(
                esn0_db=self.esn0_db, n_iter=self.max_iter, n_levels=self.n_levels,
                n_clusters=self.n_clusters, mode=self.mode, grid_policy=self.grid_policy,
                random_state=self.random_state,
            ).fit(self.code_.protograph)
            self.lut_ = builder.lut_
        check_lut_compatible(self.code_, self.lut_, self.max_iter)
        return self

    def _decode_one(self, llr, max_iters, trace=False):
        return id_msa_decode(self.code_, llr, max_iters, self.lut_, trace)


def make_decoder(kind: str, max_iter: int, msa_factor: float = 0.75, lut=None):
    kind = kind.lower().replace("-", "")
    if kind == "spa":
        return SumProductDecoder(max_iter=max_iter)
    if kind == "msa":
        return MinSumDecoder(factor=msa_factor, max_iter=max_iter)
    if kind == "idmsa":
        if lut is None:
            raise ValueError("the idmsa decoder needs a LUT")
        return IdMinSumDecoder(lut=lut, max_iter=max_iter)
    raise ValueError(f"unknown decoder {kind!r}")
