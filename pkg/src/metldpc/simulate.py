"""Monte Carlo frame-error-rate estimation over the BI-AWGN channel."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, frame_rng, transmit_all_zero
from .decoders import IdMinSumDecoder, check_lut_compatible

RESULT_COLUMNS = ["esn0_db", "frames", "frame_errors", "fer", "ci_lo", "ci_hi", "avg_iters",
                  "avg_lookups", "decoder", "code_name", "seed"]


@dataclass(frozen=True)
class SimConfig:
    max_iterations: int = 500
    max_frames: int = 10_000
    target_frame_errors: int = 50
    seed: int = 0
    workers: int = 1
    batch_size: int = 16

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.target_frame_errors < 1:
            raise ValueError("target_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1 or self.batch_size < 1:
            raise ValueError("workers and batch_size must be >= 1")


@dataclass(frozen=True)
class FerResult:
    esn0_db: float
    frames_run: int
    frame_errors: int
    fer: float
    fer_ci95: tuple
    avg_iterations: float
    lookup_count_avg: float
    decoder: str = ""
    code_name: str = ""
    seed: int = 0

    def row(self) -> dict:
        return {
            "esn0_db": self.esn0_db, "frames": self.frames_run, "frame_errors": self.frame_errors,
            "fer": self.fer, "ci_lo": self.fer_ci95[0], "ci_hi": self.fer_ci95[1],
            "avg_iters": self.avg_iterations, "avg_lookups": self.lookup_count_avg,
            "decoder": self.decoder, "code_name": self.code_name, "seed": self.seed,
        }


def wilson_interval(errors: int, n: int, z: float = 1.959963984540054) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return (0.0, 1.0)
    p = errors / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def _run_frames(code, decoder, params, max_iters, seed, start, stop):
    """Decode frames ``start..stop-1``; returns per-frame (error, iters, lookups)."""
    out = np.zeros((stop - start, 3), dtype=np.int64)
    for k, idx in enumerate(range(start, stop)):
        llr = transmit_all_zero(code, params, frame_rng(seed, idx))
        res = decoder._decode_one(llr, max_iters)
        out[k] = (0 if res.success else 1, res.iterations_used, res.lookup_count)
    return out


def _worker(args):
    return _run_frames(*args)


def run_fer(code, decoder, params: ChannelParams, cfg: SimConfig) -> FerResult:
    """Estimate the FER of a fitted decoder at one channel point.

    Frames are drawn in index order from per-frame generators seeded by
    ``(cfg.seed, frame_index)``; the run stops at the first frame index where
    the error count reaches ``target_frame_errors``, or at ``max_frames``.
    Frames finished beyond that index by parallel workers are discarded, so
    the result does not depend on ``cfg.workers``.
    """
    if getattr(decoder, "code_", None) is not code:
        decoder.fit(code)
    if isinstance(decoder, IdMinSumDecoder):
        check_lut_compatible(code, decoder.lut_, cfg.max_iterations)

    chunks = []
    errors = 0
    done = 0
    batch = cfg.batch_size
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        while done < cfg.max_frames and errors < cfg.target_frame_errors:
            span = batch * cfg.workers
            stop = min(done + span, cfg.max_frames)
            bounds = list(range(done, stop, batch)) + [stop]
            jobs = [(code, decoder, params, cfg.max_iterations, cfg.seed, a, b)
                    for a, b in zip(bounds[:-1], bounds[1:])]
            parts = list(pool.map(_worker, jobs)) if pool else [_worker(j) for j in jobs]
            block = np.concatenate(parts)
            cum = errors + np.cumsum(block[:, 0])
            hit = np.flatnonzero(cum >= cfg.target_frame_errors)
            if hit.size:
                block = block[: hit[0] + 1]
            chunks.append(block)
            errors += int(block[:, 0].sum())
            done += len(block)
    finally:
        if pool:
            pool.shutdown()

    frames = np.concatenate(chunks)
    n = len(frames)
    k = int(frames[:, 0].sum())
    return FerResult(
        esn0_db=float(params.esn0_db),
        frames_run=n,
        frame_errors=k,
        fer=k / n,
        fer_ci95=wilson_interval(k, n),
        avg_iterations=float(frames[:, 1].mean()),
        lookup_count_avg=float(frames[:, 2].mean()),
        decoder=getattr(decoder, "kind", type(decoder).__name__),
        code_name=code.name,
        seed=cfg.seed,
    )


def sweep(code, decoder, esn0_list, cfg: SimConfig) -> list:
    return [run_fer(code, decoder, ChannelParams(float(s)), cfg) for s in esn0_list]


def write_results(results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        w.writeheader()
        for r in results:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.row().items()})


def read_results(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def snr_at_fer(esn0, fer, target: float = 0.1) -> float:
    """Es/N0 where the curve crosses ``target``, log-linear interpolation.

    Uses the first adjacent pair (in increasing SNR) with ``fer >= target``
    followed by ``fer < target``. Returns NaN when the curve never crosses.
    """
    order = np.argsort(esn0)
    x = np.asarray(esn0, dtype=float)[order]
    y = np.asarray(fer, dtype=float)[order]
    for k in range(len(x) - 1):
        if y[k] >= target > y[k + 1]:
            if y[k + 1] <= 0:
                return float(x[k + 1])
            ly0, ly1, lt = math.log10(y[k]), math.log10(y[k + 1]), math.log10(target)
            return float(x[k] + (lt - ly0) * (x[k + 1] - x[k]) / (ly1 - ly0))
    return float("nan")


def find_threshold(code, decoder, start_db: float, step_db: float, cfg: SimConfig,
                   target: float = 0.1, max_points: int = 60):
    """Step Es/N0 upward from ``start_db`` until the FER falls below ``target``.

    Returns the interpolated crossing and every :class:`FerResult` computed.
    ``start_db`` must lie on the high-FER side of the crossing.
    """
    results = []
    s = start_db
    for _ in range(max_points):
        r = run_fer(code, decoder, ChannelParams(round(s, 10)), cfg)
        results.append(r)
        if r.fer < target:
            break
        s += step_db
    if results[0].fer < target:
        raise ValueError(f"start point {start_db} dB is already below FER {target}")
    x = [r.esn0_db for r in results]
    y = [r.fer for r in results]
    return snr_at_fer(x, y, target), results


__all__ = ["SimConfig", "FerResult", "run_fer", "sweep", "wilson_interval", "write_results",
           "read_results", "snr_at_fer", "find_threshold"]
