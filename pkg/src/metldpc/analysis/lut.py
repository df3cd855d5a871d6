"""Scaling-coefficient tables for iteration-dependent min-sum decoding.

For an output edge of type ``i`` at iteration ``t`` the table stores, on a
grid of second-smallest input magnitudes ``b``, the expected tanh scaling

    c(b) = tanh(b / 2) * prod_l T_l(b)

where each residual edge type ``l`` contributes the tail expectation of
``tanh(|x| / 2)`` over ``|x| >= b`` under its consistent-Gaussian density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

NORMALIZED = "normalized"
PAPER_LITERAL = "paper-literal"
MODES = (NORMALIZED, PAPER_LITERAL)

GRID_CHANNEL_QUANTILE = "channel-quantile"
GRID_POOLED_QUANTILE = "pooled-quantile"
GRID_POLICIES = (GRID_CHANNEL_QUANTILE, GRID_POOLED_QUANTILE)

TRUNCATION_SIGMAS = 10.0


def tail_tanh_expectation(beta: float, mu: float, mode: str = NORMALIZED):
    """Tail integral of ``tanh(|x|/2)`` over ``|x| >= beta`` for ``x ~ N(mu, 2 mu)``.

    Returns ``(value, flagged)``. In normalized mode the integral is divided
    by the tail mass, giving a conditional expectation; a tail with no mass
    inside the truncation window clamps to 1 and sets ``flagged``.

    The integrand is rewritten as ``1 - (1 - tanh(|x|/2))`` and the
    complement is integrated against the conditional density, which stays
    accurate when the tail mass is tiny.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    beta = float(beta)
    mu = float(mu)
    if beta < 0 or mu < 0:
        raise ValueError("beta and mu must be non-negative")
    if mu == 0.0:
        if beta == 0.0:
            return 0.0, False
        return (1.0, True) if mode == NORMALIZED else (0.0, False)
    s = math.sqrt(2.0 * mu)
    upper = mu + TRUNCATION_SIGMAS * s
    if beta >= upper:
        return (1.0, True) if mode == NORMALIZED else (0.0, False)

    log_mass = float(np.logaddexp(stats.norm.logsf(beta, mu, s), stats.norm.logsf(beta, -mu, s)))

    log_norm = -log_mass - math.log(s * math.sqrt(2.0 * math.pi))

    def integrand(x):
        zp = (x - mu) / s
        zm = (x + mu) / s
        w = math.exp(log_norm - 0.5 * zp * zp) + math.exp(log_norm - 0.5 * zm * zm)
        return w * 2.0 / (1.0 + math.exp(x))

    peak = min(max(beta, mu), upper)
    pts = [peak] if beta < peak < upper else None
    comp, _ = integrate.quad(integrand, beta, upper, epsabs=1e-9, epsrel=1e-10, limit=200, points=pts)
    conditional = min(max(1.0 - comp, 0.0), 1.0)
    if mode == NORMALIZED:
        return conditional, False
    return conditional * math.exp(log_mass), False


def residual_types(row_types, out_slot: int) -> list:
    """Edge types left after removing the output slot and the two minima.

    The minima are conventionally the two lowest-indexed remaining slots.
    Returns ``None`` when fewer than two other slots exist.
    """
    others = [t for k, t in enumerate(row_types) if k != out_slot]
    if len(others) < 2:
        return None
    return others[2:]


def scaling_coefficient(beta2nd: float, residual, densities, t: int, mode: str = NORMALIZED):
    """Expected tanh scaling given the second-smallest magnitude.

    Parameters
    ----------
    beta2nd : float
        Second-smallest input magnitude at the check.
    residual : sequence of int
        Edge types (1-based) of the check's edges other than the output edge
        and the two minima.
    densities : EdgeDensitySchedule
    t : int
        1-based iteration.

    Returns
    -------
    value, flagged : float, bool
    """
    value = math.tanh(beta2nd / 2.0)
    flagged = False
    for ell in residual:
        tl, fl = tail_tanh_expectation(beta2nd, densities.mu[t - 1, ell - 1], mode)
        value *= tl
        flagged |= fl
    return value, flagged


def _folded_cdf(b, mu, s):
    return stats.norm.cdf((b - mu) / s) - stats.norm.cdf((-b - mu) / s)


def _mixture_quantiles(mus: np.ndarray, probs: np.ndarray) -> np.ndarray:
    mus = mus[mus > 0]
    if len(mus) == 0:
        raise ValueError("cannot place a grid on an all-zero density")
    ss = np.sqrt(2.0 * mus)
    hi = float((mus + 12 * ss).max())

    def cdf(b):
        return float(np.mean(_folded_cdf(b, mus, ss)))

    return np.array([optimize.brentq(lambda b: cdf(b) - p, 0.0, hi, xtol=1e-13) for p in probs])


def quantization_grid(n_levels: int, channel_mu: float, densities=None,
                      policy: str = GRID_POOLED_QUANTILE) -> np.ndarray:
    """Grid of ``n_levels`` magnitudes at the ``q / (Q + 1)`` quantiles.

    ``channel-quantile`` uses the channel LLR magnitude distribution.
    ``pooled-quantile`` uses the equal-weight mixture of the distinct
    (iteration, edge type) densities in ``densities``, so late iterations
    with large magnitudes get grid points too.
    """
    probs = np.arange(1, n_levels + 1) / (n_levels + 1)
    if policy == GRID_CHANNEL_QUANTILE:
        return _mixture_quantiles(np.array([channel_mu]), probs)
    if policy == GRID_POOLED_QUANTILE:
        if densities is None:
            raise ValueError("pooled-quantile grid needs densities")
        return _mixture_quantiles(np.unique(np.round(densities.mu.ravel(), 12)), probs)
    raise ValueError(f"unknown grid policy {policy!r}")


@dataclass(frozen=True, eq=False)
class RawLut:
    """``table[t - 1, i - 1, q]`` with the magnitude grid it was built on."""

    table: np.ndarray
    grid: np.ndarray
    mode: str = NORMALIZED
    grid_policy: str = GRID_POOLED_QUANTILE
    flagged: int = 0
    source: str = ""
    esn0_db: float = float("nan")

    @property
    def n_iter(self) -> int:
        return self.table.shape[0]

    @property
    def n_edge_types(self) -> int:
        return self.table.shape[1]

    @property
    def n_levels(self) -> int:
        return self.table.shape[2]

    def heatmap(self) -> np.ndarray:
        """Grid-averaged coefficient per (iteration, edge type)."""
        return self.table.mean(axis=2)


@dataclass(frozen=True, eq=False)
class CompressedLut:
    """Clustered table: row ``index_map[t-1, i-1]`` of ``cluster_rows`` serves (t, i).

    ``index_map`` is 0-based.
    """

    cluster_rows: np.ndarray
    index_map: np.ndarray
    grid: np.ndarray
    mode: str = NORMALIZED
    grid_policy: str = GRID_POOLED_QUANTILE
    source: str = ""
    esn0_db: float = float("nan")
    errors: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.ascontiguousarray(self.cluster_rows, dtype=np.float64)
        imap = np.ascontiguousarray(self.index_map, dtype=np.int64)
        grid = np.ascontiguousarray(self.grid, dtype=np.float64)
        if rows.ndim != 2 or imap.ndim != 2 or grid.ndim != 1:
            raise ValueError("bad LUT dimensions")
        if rows.shape[1] != len(grid):
            raise ValueError("cluster rows and grid disagree on the number of levels")
        if imap.size and (imap.min() < 0 or imap.max() >= rows.shape[0]):
            raise ValueError("index map points outside the cluster rows")
        if np.any(~np.isfinite(rows)) or np.any(rows < 0) or np.any(rows > 1):
            raise ValueError("LUT values must lie in [0, 1]")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        for name, arr in (("cluster_rows", rows), ("index_map", imap), ("grid", grid)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_iter(self) -> int:
        return self.index_map.shape[0]

    @property
    def n_edge_types(self) -> int:
        return self.index_map.shape[1]

    @property
    def n_levels(self) -> int:
        return len(self.grid)

    @property
    def n_clusters(self) -> int:
        return self.cluster_rows.shape[0]

    @property
    def entry_count(self) -> int:
        """Stored coefficient scalars (cluster rows times levels)."""
        return self.cluster_rows.size

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.grid[1:] + self.grid[:-1])

    def reconstruct(self) -> np.ndarray:
        return self.cluster_rows[self.index_map]

    def lookup(self, t: int, edge_type: int, beta2nd: float) -> float:
        """Coefficient for 1-based ``t`` and ``edge_type``; nearest grid point, clamped."""
        q = int(np.searchsorted(self.midpoints, beta2nd))
        return float(self.cluster_rows[self.index_map[t - 1, edge_type - 1], q])

    @classmethod
    def constant(cls, n_iter: int, n_edge_types: int, grid, value: float = 1.0) -> "CompressedLut":
        grid = np.asarray(grid, dtype=float)
        return cls(np.full((1, len(grid)), value), np.zeros((n_iter, n_edge_types), dtype=np.int64), grid)


def build_raw_lut(proto, densities, n_iter: int | None = None, n_levels: int = 32,
                  grid=None, grid_policy: str = GRID_POOLED_QUANTILE, mode: str = NORMALIZED,
                  channel_mu: float | None = None) -> RawLut:
    """Evaluate the scaling coefficient for every (iteration, edge type, level).

    An edge type appearing at several protograph checks is averaged over its
    slots. Checks of degree 2 get coefficient 1 (pass-through) and degree-1
    checks, which always emit 0, also store 1.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    T = densities.n_iter if n_iter is None else int(n_iter)
    if T < 1 or T > densities.n_iter:
        raise ValueError(f"densities cover {densities.n_iter} iterations, {T} requested")
    e = proto.n_edge_types
    if densities.n_edge_types != e:
        raise ValueError("densities and protograph disagree on the number of edge types")
    if grid is None:
        if channel_mu is None:
            channel_mu = float(densities.mu[0][densities.mu[0] > 0].max())
        grid = quantization_grid(n_levels, channel_mu, densities, grid_policy)
    grid = np.asarray(grid, dtype=float)
    Q = len(grid)

    # per type: list of (weight, residual type tuple or None)
    slots = proto.slots
    structures: dict = {i: {} for i in range(1, e + 1)}
    for r in range(proto.n_rows):
        row = slots[slots[:, 0] == r]
        row_types = row[:, 3].tolist()
        for k, ti in enumerate(row_types):
            res = residual_types(row_types, k)
            key = None if res is None else tuple(res)
            structures[ti][key] = structures[ti].get(key, 0) + 1

    needed = sorted({ell for per in structures.values() for key in per if key for ell in key})
    tails: dict = {}
    flagged = 0
    for t in range(1, T + 1):
        for ell in needed:
            vals = np.empty(Q)
            for q, b in enumerate(grid):
                vals[q], fl = tail_tanh_expectation(b, densities.mu[t - 1, ell - 1], mode)
                flagged += fl
            tails[t, ell] = vals

    base = np.tanh(grid / 2.0)
    table = np.zeros((T, e, Q))
    for i, per in structures.items():
        total = sum(per.values())
        for key, weight in per.items():
            if key is None:
                table[:, i - 1, :] += weight / total
                continue
            for t in range(1, T + 1):
                c = base.copy()
                for ell in key:
                    c = c * tails[t, ell]
                table[t - 1, i - 1, :] += weight / total * c
    table = np.clip(table, 0.0, 1.0)
    return RawLut(table, grid, mode, grid_policy, flagged, proto.name, densities.esn0_db)


def compress_lut(raw: RawLut, k: int, seed: int = 0, max_iter: int = 200, tol: float = 1e-10) -> CompressedLut:
    """Cluster the ``T * e`` coefficient rows with k-means.

    Uses seeded k-means++ initialization and Lloyd iterations. ``k`` equal to
    the row count returns the rows themselves (exact reconstruction).
    """
    from sklearn.cluster import KMeans

    rows = raw.table.reshape(-1, raw.n_levels)
    n_rows = rows.shape[0]
    k = int(k)
    if not 1 <= k <= n_rows:
        raise ValueError(f"k must be in 1..{n_rows}, got {k}")
    if k == n_rows:
        centers = rows.copy()
        labels = np.arange(n_rows)
    else:
        # sklearn scales tol by the mean per-feature variance; undo that so
        # tol is an absolute centroid-shift threshold
        var = float(np.mean(np.var(rows, axis=0)))
        rel_tol = tol / var if var > 0 else 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=max_iter, tol=rel_tol,
                        random_state=seed, algorithm="lloyd").fit(rows)
        labels = km.labels_
        centers = np.clip(km.cluster_centers_, 0.0, 1.0)
        # Lloyd may stop between an assignment and an update step
        centers = np.array([rows[labels == c].mean(axis=0) if np.any(labels == c) else centers[c]
                            for c in range(k)])
    err = np.abs(centers[labels] - rows)
    return CompressedLut(
        cluster_rows=np.clip(centers, 0.0, 1.0),
        index_map=labels.reshape(raw.n_iter, raw.n_edge_types),
        grid=raw.grid,
        mode=raw.mode,
        grid_policy=raw.grid_policy,
        source=raw.source,
        esn0_db=raw.esn0_db,
        errors={"mean_abs": float(err.mean()), "max_abs": float(err.max())},
    )


def heatmap_rows(raw: RawLut):
    """``(t, edge_type, mean_c)`` tuples, 1-based, iteration-major."""
    hm = raw.heatmap()
    return [(t + 1, i + 1, float(hm[t, i])) for t in range(hm.shape[0]) for i in range(hm.shape[1])]
