"""Per-iteration, per-edge-type message densities on a protograph.

:func:`pexit_run` tracks mutual information along every protograph edge
slot under the consistent-Gaussian approximation. :func:`mc_density_evolution`
propagates sample populations through the same recursion without any
Gaussian assumption and serves as its cross-check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelParams
from ..kernels import box_plus
from .._loops import LLR_MAX
from .jfunc import j_function, j_inverse

HIST_EDGES = np.linspace(-LLR_MAX, LLR_MAX, 153)


@dataclass(frozen=True, eq=False)
class EdgeDensitySchedule:
    """Variable-to-check message densities entering the check update.

    ``mu[t - 1, l - 1]`` is the consistent-Gaussian mean for iteration ``t``
    and edge type ``l``; ``mi`` is the matching mutual information. Monte
    Carlo schedules also carry per-cell histograms over :data:`HIST_EDGES`.
    """

    mu: np.ndarray
    mi: np.ndarray
    esn0_db: float
    method: str = "pexit"
    hist: np.ndarray | None = field(default=None, repr=False)
    app_mi: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if np.any(self.mu < 0):
            raise ValueError("density means must be non-negative")
        if self.hist is not None and not np.allclose(self.hist.sum(axis=-1), 1.0, atol=1e-9):
            raise ValueError("histogram masses must sum to 1")

    @property
    def n_iter(self) -> int:
        return self.mu.shape[0]

    @property
    def n_edge_types(self) -> int:
        return self.mu.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "edge_type", "mu", "mi", "esn0_db", "method"])
            for t in range(self.n_iter):
                for ell in range(self.n_edge_types):
                    w.writerow([t + 1, ell + 1, repr(float(self.mu[t, ell])),
                                repr(float(self.mi[t, ell])), self.esn0_db, self.method])

    @classmethod
    def from_csv(cls, path) -> "EdgeDensitySchedule":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path}: empty schedule")
        T = max(int(r["t"]) for r in rows)
        e = max(int(r["edge_type"]) for r in rows)
        mu = np.full((T, e), np.nan)
        mi = np.full((T, e), np.nan)
        for r in rows:
            mu[int(r["t"]) - 1, int(r["edge_type"]) - 1] = float(r["mu"])
            mi[int(r["t"]) - 1, int(r["edge_type"]) - 1] = float(r["mi"])
        if np.isnan(mu).any():
            raise ValueError(f"{path}: schedule has missing cells")
        return cls(mu, mi, float(rows[0]["esn0_db"]), rows[0]["method"])


def _channel_means(proto, channel: ChannelParams) -> np.ndarray:
    mu = np.full(proto.n_cols, channel.llr_mean)
    mu[np.asarray(proto.punctured, dtype=bool)] = 0.0
    return mu


def _per_type(values: np.ndarray, types: np.ndarray, e: int) -> np.ndarray:
    counts = np.bincount(types - 1, minlength=e)
    sums = np.bincount(types - 1, weights=values, minlength=e)
    with np.errstate(invalid="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)


def pexit_run(proto, channel: ChannelParams, n_iter: int) -> EdgeDensitySchedule:
    """Protograph EXIT recursion, flooding schedule.

    Iteration 1 records the channel densities; each later iteration records
    the variable-to-check densities after one more check/variable update.
    Slots sharing an edge type are merged by averaging their mutual
    information.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    slots = proto.slots
    rows, cols, types = slots[:, 0], slots[:, 1], slots[:, 3]
    e = proto.n_edge_types
    mu_ch = _channel_means(proto, channel)
    n_slots = len(slots)

    mu_hist = np.zeros((n_iter, e))
    mi_hist = np.zeros((n_iter, e))
    app_hist = np.zeros((n_iter, proto.n_cols))
    i_c2v = np.zeros(n_slots)
    for t in range(n_iter):
        mu_in = j_inverse(i_c2v)
        col_sum = np.bincount(cols, weights=mu_in, minlength=proto.n_cols)
        app_hist[t] = j_function(mu_ch + col_sum)
        mu_v2c = np.maximum(mu_ch[cols] + col_sum[cols] - mu_in, 0.0)
        i_v2c = j_function(mu_v2c)
        mi_t = _per_type(i_v2c, types, e)
        mi_hist[t] = mi_t
        mu_hist[t] = j_inverse(mi_t)

        x = j_inverse(1.0 - i_v2c)
        row_sum = np.bincount(rows, weights=x, minlength=proto.n_rows)
        i_c2v = 1.0 - j_function(np.maximum(row_sum[rows] - x, 0.0))
    return EdgeDensitySchedule(mu_hist, mi_hist, channel.esn0_db, "pexit", app_mi=app_hist)


def pexit_threshold(proto, n_iter: int, lo_db: float, hi_db: float, tol_db: float = 0.01,
                    target: float = 1.0 - 1e-6) -> float:
    """Smallest Es/N0 (bisection) at which every unpunctured proto-VN reaches
    a-posteriori mutual information ``target`` within ``n_iter`` iterations."""
    keep = ~np.asarray(proto.punctured, dtype=bool)

    def ok(snr):
        d = pexit_run(proto, ChannelParams(snr), n_iter)
        return d.app_mi[-1][keep].min() >= target

    if not ok(hi_db):
        return float("nan")
    while hi_db - lo_db > tol_db:
        mid = 0.5 * (lo_db + hi_db)
        if ok(mid):
            hi_db = mid
        else:
            lo_db = mid
    return hi_db


def _sample_mi(x: np.ndarray) -> float:
    return float(1.0 - np.mean(np.logaddexp(0.0, -x)) / np.log(2.0))


def mc_density_evolution(proto, channel: ChannelParams, n_iter: int, samples: int = 100_000,
                         seed: int = 0) -> EdgeDensitySchedule:
    """Sampled density evolution on the cycle-free protograph ensemble.

    Each edge slot keeps a population of ``samples`` variable-to-check
    messages. Every check and variable update combines independently
    permuted populations from the other slots, with fresh channel samples,
    which models tree-like neighbourhoods under the all-zero codeword.
    ``mu`` records the sample mean per edge type.
    """
    if samples < 10_000:
        raise ValueError("samples must be >= 1e4")
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    rng = np.random.default_rng(seed)
    slots = proto.slots
    rows, cols, types = slots[:, 0], slots[:, 1], slots[:, 3]
    e = proto.n_edge_types
    mu_ch = _channel_means(proto, channel)
    sigma = np.sqrt(2.0 * mu_ch)
    n_slots = len(slots)
    by_row = [np.flatnonzero(rows == r) for r in range(proto.n_rows)]
    by_col = [np.flatnonzero(cols == c) for c in range(proto.n_cols)]

    def channel_draw(col):
        return np.clip(mu_ch[col] + sigma[col] * rng.standard_normal(samples), -LLR_MAX, LLR_MAX)

    v2c = np.stack([channel_draw(c) for c in cols]) if n_slots else np.zeros((0, samples))
    c2v = np.zeros_like(v2c)
    mu_hist = np.zeros((n_iter, e))
    mi_hist = np.zeros((n_iter, e))
    hist = np.zeros((n_iter, e, len(HIST_EDGES) - 1))
    for t in range(n_iter):
        for ell in range(1, e + 1):
            pool = v2c[types == ell].ravel()
            mu_hist[t, ell - 1] = max(pool.mean(), 0.0)
            mi_hist[t, ell - 1] = _sample_mi(pool)
            counts, _ = np.histogram(pool, bins=HIST_EDGES)
            hist[t, ell - 1] = counts / counts.sum()

        for k in range(n_slots):
            acc = None
            for other in by_row[rows[k]]:
                if other == k:
                    continue
                draw = v2c[other][rng.permutation(samples)]
                acc = draw if acc is None else box_plus(acc, draw)
            c2v[k] = 0.0 if acc is None else np.clip(acc, -LLR_MAX, LLR_MAX)
        for k in range(n_slots):
            total = channel_draw(cols[k])
            for other in by_col[cols[k]]:
                if other != k:
                    total = total + c2v[other][rng.permutation(samples)]
            v2c[k] = np.clip(total, -LLR_MAX, LLR_MAX)
    return EdgeDensitySchedule(mu_hist, mi_hist, channel.esn0_db, "monte-carlo", hist)
