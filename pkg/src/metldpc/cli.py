"""Command-line front end: build codes, analyze protographs, build LUTs, simulate.

Every subcommand validates its inputs before creating any file, then writes
its artifacts into ``--out-dir`` together with a JSON run manifest. Exit
codes: 0 on success, 1 on a runtime failure, 2 on a usage or validation
error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__


class UsageError(Exception):
    """Bad arguments or inputs, detected before any output is written."""


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _hash_input(spec: str) -> str:
    if spec.startswith("builtin:"):
        from importlib.resources import files

        data = files("metldpc.data").joinpath(spec.split(":", 1)[1] + ".proto").read_bytes()
        return hashlib.sha256(data).hexdigest()
    return _sha256(spec)


def _write_manifest(args, params: dict, inputs: list, outputs: list) -> Path:
    path = Path(args.manifest) if args.manifest else Path(args.out_dir) / f"{args.command}.manifest.json"
    manifest = {
        "subcommand": args.command,
        "params": params,
        "inputs": {str(p): _hash_input(str(p)) for p in inputs},
        "outputs": sorted(str(p) for p in outputs),
        "seed": args.seed,
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_proto(spec: str):
    from .protograph import ProtographFormatError, load_protograph

    try:
        return load_protograph(spec)
    except ProtographFormatError as exc:
        raise UsageError(f"{spec}: {exc}") from None
    except (OSError, FileNotFoundError, ModuleNotFoundError) as exc:
        raise UsageError(f"cannot read protograph {spec}: {exc}") from None


def _positive(name, value):
    if value < 1:
        raise UsageError(f"{name} must be >= 1, got {value}")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(x):
    return repr(float(x))


# -- build-code ---------------------------------------------------------------


def cmd_build_code(args) -> int:
    from .code import LiftingError, code_stats, lift_protograph, write_code

    proto = _load_proto(args.proto)
    if args.girth_retries < 0:
        raise UsageError("--girth-retries must be >= 0")
    try:
        code = lift_protograph(proto, args.z, seed=args.seed, girth_retries=args.girth_retries,
                               name=args.name)
    except LiftingError as exc:
        raise UsageError(str(exc)) from None

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = write_code(code, out / args.prefix)
    stats = code_stats(code)
    stats_path = out / f"{args.prefix}_stats.csv"
    rows = [
        ("n", code.n), ("m", code.m), ("z", code.z), ("rate", _fmt(code.rate)),
        ("n_edges", code.n_edges), ("n_edge_types", code.n_edge_types),
        ("frac_cns_touching_deg1_vns", _fmt(stats.frac_cns_touching_deg1_vns)),
    ]
    rows += [(f"vn_degree_{d}", c) for d, c in stats.vn_degree_histogram.items()]
    rows += [(f"cn_degree_{d}", c) for d, c in stats.cn_degree_histogram.items()]
    _write_rows(stats_path, ["metric", "value"], rows)
    params = {"proto": args.proto, "z": args.z, "girth_retries": args.girth_retries,
              "name": code.name, "prefix": args.prefix}
    _write_manifest(args, params, [args.proto], [csv_path, json_path, stats_path])
    print(f"{code.name}: n={code.n} m={code.m} rate={code.rate:.6g} "
          f"deg1-fraction={stats.frac_cns_touching_deg1_vns:.4f} -> {json_path}")
    return 0


# -- analyze / build-lut -------------------------------------------------------


def _densities(args, proto):
    from .analysis.pexit import mc_density_evolution, pexit_run
    from .channel import ChannelParams

    channel = ChannelParams(args.esn0)
    if args.method == "pexit":
        return pexit_run(proto, channel, args.iterations)
    return mc_density_evolution(proto, channel, args.iterations, samples=args.samples, seed=args.seed)


def _check_lut_flags(args):
    from .analysis.lut import GRID_POLICIES, MODES

    _positive("--iterations", args.iterations)
    _positive("--levels", args.levels)
    if args.mode not in MODES:
        raise UsageError(f"--mode must be one of {MODES}")
    if args.grid_policy not in GRID_POLICIES:
        raise UsageError(f"--grid-policy must be one of {GRID_POLICIES}")


def _raw_lut(args, proto, densities):
    from .analysis.lut import build_raw_lut
    from .channel import ChannelParams

    return build_raw_lut(proto, densities, args.iterations, args.levels, grid_policy=args.grid_policy,
                         mode=args.mode, channel_mu=ChannelParams(densities.esn0_db).llr_mean)


def _write_heatmap(raw, path):
    from .analysis.lut import heatmap_rows

    _write_rows(path, ["t", "edge_type", "mean_c"], [(t, i, _fmt(c)) for t, i, c in heatmap_rows(raw)])


def cmd_analyze(args) -> int:
    proto = _load_proto(args.proto)
    _positive("--iterations", args.iterations)
    if args.method == "mc" and args.samples < 10_000:
        raise UsageError("--samples must be >= 10000")
    if args.heatmap:
        _check_lut_flags(args)

    densities = _densities(args, proto)
    raw = _raw_lut(args, proto, densities) if args.heatmap else None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dens_path = out / "densities.csv"
    densities.to_csv(dens_path)
    outputs = [dens_path]
    if raw is not None:
        outputs.append(out / "heatmap.csv")
        _write_heatmap(raw, outputs[-1])
    params = {k: getattr(args, k) for k in ("proto", "esn0", "iterations", "method", "samples",
                                           "heatmap", "levels", "mode", "grid_policy")}
    _write_manifest(args, params, [args.proto], outputs)
    final = densities.mi[-1]
    print(f"{proto.name}: {densities.n_iter} iterations, {densities.n_edge_types} edge types, "
          f"final MI min={final.min():.6f} max={final.max():.6f} -> {dens_path}")
    return 0


def cmd_build_lut(args) -> int:
    from .analysis.lut import compress_lut
    from .analysis.lut_io import write_lut, write_lut_csv
    from .analysis.pexit import EdgeDensitySchedule

    proto = _load_proto(args.proto)
    _check_lut_flags(args)
    _positive("--clusters", args.clusters)
    inputs = [args.proto]
    if args.densities:
        try:
            densities = EdgeDensitySchedule.from_csv(args.densities)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read densities {args.densities}: {exc}") from None
        if densities.n_edge_types != proto.n_edge_types or densities.n_iter < args.iterations:
            raise UsageError("densities do not cover the protograph's edge types and --iterations")
        inputs.append(args.densities)
    else:
        if args.esn0 is None:
            raise UsageError("build-lut needs --esn0 or --densities")
        if args.method == "mc" and args.samples < 10_000:
            raise UsageError("--samples must be >= 10000")
        densities = None
    if args.clusters > args.iterations * proto.n_edge_types:
        raise UsageError(f"--clusters must be <= iterations x edge types = "
                         f"{args.iterations * proto.n_edge_types}")

    if densities is None:
        densities = _densities(args, proto)
    raw = _raw_lut(args, proto, densities)
    lut = compress_lut(raw, args.clusters, seed=args.seed)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / v for k, v in (("bin", "lut.bin"), ("csv", "lut.csv"), ("heatmap", "heatmap.csv"),
                                     ("report", "lut_report.json"))}
    write_lut(lut, paths["bin"])
    write_lut_csv(lut, paths["csv"])
    _write_heatmap(raw, paths["heatmap"])
    report = {
        "raw_entries": int(raw.table.size),
        "entry_count": lut.entry_count,
        "n_clusters": lut.n_clusters,
        "mean_abs_error": lut.errors["mean_abs"],
        "max_abs_error": lut.errors["max_abs"],
        "flagged_tails": int(raw.flagged),
        "grid": [float(g) for g in lut.grid],
    }
    with open(paths["report"], "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    params = {k: getattr(args, k) for k in ("proto", "densities", "esn0", "iterations", "method",
                                           "samples", "levels", "clusters", "mode", "grid_policy")}
    _write_manifest(args, params, inputs, paths.values())
    print(f"{proto.name}: {raw.table.size} raw entries -> {lut.entry_count} stored "
          f"(k={lut.n_clusters}), max reconstruction error {lut.errors['max_abs']:.3g} -> {paths['bin']}")
    return 0


# -- simulate -----------------------------------------------------------------


def _esn0_points(args) -> list:
    if args.esn0_range:
        start, stop, step = args.esn0_range
        if step <= 0 or stop < start:
            raise UsageError("--esn0-range needs START <= STOP and STEP > 0")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 10) for k in range(n)]
    return [float(s) for s in args.esn0]


def cmd_simulate(args) -> int:
    from .analysis.lut_io import LutFormatError, read_lut
    from .code import read_code
    from .decoders import LutMismatchError, check_lut_compatible, make_decoder
    from .simulate import SimConfig, sweep, write_results

    points = _esn0_points(args)
    if not all(np.isfinite(points)):
        raise UsageError("Es/N0 points must be finite")
    try:
        cfg = SimConfig(max_iterations=args.max_iterations, max_frames=args.max_frames,
                        target_frame_errors=args.target_errors, seed=args.seed,
                        workers=args.workers, batch_size=args.batch_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kind = args.decoder
    if not 0.0 < args.msa_factor <= 1.0:
        raise UsageError(f"--msa-factor must be in (0, 1], got {args.msa_factor}")
    if kind == "idmsa" and not args.lut:
        raise UsageError("--decoder idmsa needs --lut")
    try:
        code = read_code(args.code)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read code {args.code}: {exc}") from None
    inputs = [args.code]
    lut = None
    if kind == "idmsa":
        try:
            lut = read_lut(args.lut)
            check_lut_compatible(code, lut, cfg.max_iterations)
        except (OSError, LutFormatError, LutMismatchError) as exc:
            raise UsageError(f"{args.lut}: {exc}") from None
        inputs.append(args.lut)
    decoder = make_decoder(kind, cfg.max_iterations, args.msa_factor, lut).fit(code)

    results = sweep(code, decoder, points, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / args.output
    write_results(results, path)
    params = {"code": args.code, "decoder": kind, "msa_factor": args.msa_factor, "lut": args.lut,
              "esn0": points, "max_iterations": cfg.max_iterations, "max_frames": cfg.max_frames,
              "target_errors": cfg.target_frame_errors, "workers": cfg.workers,
              "batch_size": cfg.batch_size, "output": args.output}
    _write_manifest(args, params, inputs, [path])
    for r in results:
        print(f"{r.esn0_db:8.3f} dB  {kind:5s}  FER {r.fer:.4g}  ({r.frame_errors}/{r.frames_run})  "
              f"avg iters {r.avg_iterations:.1f}")
    return 0


# -- parser -------------------------------------------------------------------


def _add_globals(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="RNG seed (lifting, k-means, frames)")
    p.add_argument("--out-dir", default=d("."), help="directory for all outputs")
    p.add_argument("--manifest", default=d(None), help="manifest path (default <out-dir>/<cmd>.manifest.json)")


def _add_lut_flags(p):
    p.add_argument("--levels", type=int, default=32, help="quantization levels Q")
    p.add_argument("--mode", default="normalized", help="normalized | paper-literal")
    p.add_argument("--grid-policy", default="pooled-quantile",
                   help="channel-quantile | pooled-quantile")


def _add_density_flags(p, esn0_required: bool):
    p.add_argument("--proto", required=True, help="protograph file or builtin:<name>")
    p.add_argument("--esn0", type=float, required=esn0_required, help="design Es/N0 in dB")
    p.add_argument("--iterations", type=int, default=500, help="iterations T")
    p.add_argument("--method", choices=("pexit", "mc"), default="pexit")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo population size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metldpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-code", help="lift a protograph into a code")
    _add_globals(p, suppress=True)
    p.add_argument("--proto", required=True, help="protograph file or builtin:<name>")
    p.add_argument("--z", type=int, required=True, help="lifting factor")
    p.add_argument("--girth-retries", type=int, default=0)
    p.add_argument("--name", default=None)
    p.add_argument("--prefix", default="code", help="output file stem")
    p.set_defaults(func=cmd_build_code)

    p = sub.add_parser("analyze", help="protograph EXIT densities (+ heatmap)")
    _add_globals(p, suppress=True)
    _add_density_flags(p, esn0_required=True)
    p.add_argument("--heatmap", action="store_true", help="also write heatmap.csv")
    _add_lut_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("build-lut", help="build and compress a scaling LUT")
    _add_globals(p, suppress=True)
    _add_density_flags(p, esn0_required=False)
    p.add_argument("--densities", default=None, help="densities CSV from analyze")
    p.add_argument("--clusters", type=int, default=81, help="k-means cluster count k")
    _add_lut_flags(p)
    p.set_defaults(func=cmd_build_lut)

    p = sub.add_parser("simulate", help="Monte Carlo FER sweep")
    _add_globals(p, suppress=True)
    p.add_argument("--code", required=True, help="code JSON written by build-code")
    p.add_argument("--decoder", choices=("spa", "msa", "idmsa"), required=True)
    p.add_argument("--msa-factor", type=float, default=0.75)
    p.add_argument("--lut", default=None, help="LUT file for idmsa")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--esn0", type=float, nargs="+", help="Es/N0 points in dB")
    g.add_argument("--esn0-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--max-frames", type=int, default=10_000)
    p.add_argument("--target-errors", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--output", default="results.csv")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"metldpc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"metldpc {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
