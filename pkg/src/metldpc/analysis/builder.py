"""Estimator wrapper around the offline LUT pipeline."""

from __future__ import annotations

from sklearn.base import BaseEstimator

from ..channel import ChannelParams
from .lut import build_raw_lut, compress_lut
from .pexit import pexit_run


class ScalingLutBuilder(BaseEstimator):
    """Densities -> raw coefficient table -> k-means compressed LUT.

    ``fit(protograph)`` runs protograph EXIT analysis at ``esn0_db`` (unless
    ``densities`` is given), evaluates the table on ``n_levels`` grid points
    and clusters it into ``n_clusters`` rows.

    Attributes
    ----------
    densities_ : EdgeDensitySchedule
    raw_lut_ : RawLut
    lut_ : CompressedLut
    reconstruction_error_ : dict
        ``mean_abs`` and ``max_abs`` of the compressed table.
    """

    def __init__(self, esn0_db: float = 0.0, n_iter: int = 500, n_levels: int = 32,
                 n_clusters: int = 81, mode: str = "normalized",
                 grid_policy: str = "pooled-quantile", random_state: int = 0, densities=None):
        self.esn0_db = esn0_db
        self.n_iter = n_iter
        self.n_levels = n_levels
        self.n_clusters = n_clusters
        self.mode = mode
        self.grid_policy = grid_policy
        self.random_state = random_state
        self.densities = densities

    def fit(self, X, y=None):
        channel = ChannelParams(float(self.esn0_db))
        if self.densities is not None:
            self.densities_ = self.densities
        else:
            self.densities_ = pexit_run(X, channel, self.n_iter)
        self.raw_lut_ = build_raw_lut(
            X, self.densities_, self.n_iter, self.n_levels, grid_policy=self.grid_policy,
            mode=self.mode, channel_mu=channel.llr_mean,
        )
        k = min(int(self.n_clusters), self.raw_lut_.n_iter * self.raw_lut_.n_edge_types)
        self.lut_ = compress_lut(self.raw_lut_, k, seed=self.random_state)
        self.reconstruction_error_ = dict(self.lut_.errors)
        return self

    def transform(self, X=None):
        """The fitted raw table, shape ``(n_iter, n_edge_types, n_levels)``."""
        return self.raw_lut_.table
