"""Command-line entry point for the orientation experiments.

Subcommands: orient, sweep-tilt, benchmark, simulate-day, scalespace.
Every run is reproducible from its RunConfig, which is serialized as a
sorted-key JSON comment on the first line of each CSV output; figures
are rendered next to the CSVs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .controller import ControllerConfig, orient, sweep_tilt
from .environment import (
    RadianceMap,
    RadianceMapError,
    load_radiance_map,
    mixed_corpus,
    multimodal_recipe,
    synth_scene,
    unimodal_recipe,
)
from .ephemeris_sky import GeoTime, SkyParams, day_sequence
from .irradiance import total_irradiance
from .photodiff import (
    blur_profile,
    count_modes_1d,
    export_profile_csv,
    make_profile,
    profile_corpus_radiance,
)
from .plots import (
    plot_batch_histograms,
    plot_benchmark,
    plot_day_ledgers,
    plot_scalespace,
    plot_sweep,
)
from .simulate import (
    canyon_batch,
    compare_day,
    export_histograms,
    export_ledger_csv,
    export_summary_csv,
    simulate_day,
)
from .sphere import Orientation, SphereGrid, direction_from_angles, zenith_azimuth_deg
from .strategies import SENSOR_COUNTS, Strategy, benchmark


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to replay a run; serialized into every CSV header."""

    subcommand: str
    params: dict

    def serialized(self) -> str:
        return json.dumps({"subcommand": self.subcommand, **self.params}, sort_keys=True)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HELIOTROPE_THREADS", "1")))
    except ValueError:
        return 1


def _render_corpus(recipes, grid) -> list[RadianceMap]:
    """Render recipe seeds to maps, possibly across threads; order preserved."""
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        return list(pool.map(lambda r: synth_scene(r, grid), recipes))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # unknown flag or bad value -> exit 1
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _scene_from_args(args, grid: SphereGrid) -> RadianceMap:
    if args.map is not None:
        return load_radiance_map(args.map)
    recipe = args.recipe
    if recipe == "uniform":
        return RadianceMap(grid, np.ones(grid.shape))
    if recipe.startswith("sun:"):
        zen, az = (float(x) for x in recipe[4:].split(","))
        from .environment import sun_disk_radiance

        return sun_disk_radiance(direction_from_angles(zen, az), grid, 1000.0)
    return synth_scene(unimodal_recipe(int(recipe)), grid)


def _controller_config(args) -> ControllerConfig:
    return ControllerConfig(
        tilt_deg=args.delta_theta,
        step_deg=args.step,
        threshold=args.threshold,
        max_iters=args.max_iters,
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_orient(args) -> int:
    grid = SphereGrid(args.grid_size, args.grid_size // 2)
    try:
        rmap = _scene_from_args(args, grid)
    except (OSError, RadianceMapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    zen, az = (float(x) for x in args.start.split(","))
    start = Orientation.from_normal(direction_from_angles(zen, az))
    cfg = _controller_config(args)
    report = orient(rmap, start, cfg)
    run = RunConfig(
        "orient",
        {
            "map": args.map,
            "recipe": args.recipe,
            "start": args.start,
            "delta_theta": args.delta_theta,
            "step": args.step,
            "threshold": args.threshold,
            "max_iters": args.max_iters,
            "grid_size": args.grid_size,
        },
    )
    out = _out_dir(args)
    with open(out / "trajectory.csv", "w", newline="") as f:
        f.write(f"# {run.serialized()}\n")
        w = csv.writer(f)
        w.writerow(["iteration", "zenith_deg", "azimuth_deg", "irradiance_w_m2"])
        for i, o in enumerate(report.trajectory):
            z, a = zenith_azimuth_deg(o.normal)
            w.writerow([i, f"{z:.4f}", f"{a:.4f}", f"{total_irradiance(rmap, o):.6g}"])
    z, a = zenith_azimuth_deg(report.final.normal)
    with open(out / "summary.csv", "w", newline="") as f:
        f.write(f"# {run.serialized()}\n")
        w = csv.writer(f)
        w.writerow(["zenith_deg", "azimuth_deg", "irradiance_w_m2", "iterations", "axis_steps", "converged"])
        w.writerow(
            [f"{z:.4f}", f"{a:.4f}", f"{report.final_irradiance:.6g}", report.iterations, report.axis_steps, int(report.converged)]
        )
    print(
        f"final zenith={z:.2f} azimuth={a:.2f} irradiance={report.final_irradiance:.4g} "
        f"iterations={report.iterations} converged={report.converged}"
    )
    return 0 if report.converged else 2


def cmd_sweep_tilt(args) -> int:
    grid = SphereGrid(args.grid_size, args.grid_size // 2)
    tilts = [float(t) for t in args.tilts.split(",")]
    seeds = range(args.corpus_seed, args.corpus_seed + args.count)
    if args.corpus == "unimodal":
        recipes = [unimodal_recipe(s) for s in seeds]
    elif args.corpus == "multimodal":
        recipes = [multimodal_recipe(s) for s in seeds]
    else:
        maps = mixed_corpus(args.count, args.corpus_seed, grid)
        recipes = None
    if recipes is not None:
        maps = _render_corpus(recipes, grid)
    results = sweep_tilt(maps, tilts, starts_per_map=args.starts, seed=args.seed)
    run = RunConfig(
        "sweep-tilt",
        {
            "corpus_seed": args.corpus_seed,
            "count": args.count,
            "corpus": args.corpus,
            "tilts": args.tilts,
            "starts": args.starts,
            "seed": args.seed,
            "grid_size": args.grid_size,
        },
    )
    out = _out_dir(args)
    with open(out / "sweep.csv", "w", newline="") as f:
        f.write(f"# {run.serialized()}\n")
        w = csv.writer(f)
        w.writerow(["tilt_deg", "mean_pct_of_optimal"])
        for r in results:
            w.writerow([f"{r.tilt_deg:.4g}", f"{r.mean_pct_of_optimal:.4f}"])
    plot_sweep(results, out / "sweep.png")
    for r in results:
        print(f"tilt {r.tilt_deg:5.1f} deg: {r.mean_pct_of_optimal:.2f} % of optimal")
    return 0


def cmd_benchmark(args) -> int:
    grid = SphereGrid(args.grid_size, args.grid_size // 2)
    kinds = args.strategies.split(",")
    for k in kinds:
        if k not in SENSOR_COUNTS:
            print(f"error: unknown strategy {k!r}", file=sys.stderr)
            return 1
    if args.corpus == "uniform":
        maps = [RadianceMap(grid, np.ones(grid.shape)) for _ in range(args.count)]
    else:
        maps = mixed_corpus(args.count, args.corpus_seed, grid)
    rows = benchmark(maps, [Strategy(k) for k in kinds], starts_per_map=args.starts, seed=args.seed)
    run = RunConfig(
        "benchmark",
        {
            "corpus_seed": args.corpus_seed,
            "count": args.count,
            "corpus": args.corpus,
            "strategies": args.strategies,
            "starts": args.starts,
            "seed": args.seed,
            "grid_size": args.grid_size,
        },
    )
    out = _out_dir(args)
    with open(out / "benchmark.csv", "w", newline="") as f:
        f.write(f"# {run.serialized()}\n")
        w = csv.writer(f)
        w.writerow(["strategy", "mean_pct_of_optimal", "num_sensors"])
        for r in rows:
            w.writerow([r.strategy, f"{r.mean_pct_of_optimal:.4f}", r.num_sensors])
    plot_benchmark(rows, out / "benchmark.png")
    for r in sorted(rows, key=lambda r: -r.mean_pct_of_optimal):
        print(f"{r.strategy:15s} {r.mean_pct_of_optimal:7.2f} % of optimal ({r.num_sensors} sensors)")
    return 0


def cmd_simulate_day(args) -> int:
    grid = SphereGrid(args.grid_size, args.grid_size // 2)
    try:
        day = datetime.strptime(args.date, "%Y-%m-%d")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    site = GeoTime(args.lat, args.lon, day + timedelta(hours=4), tz_offset_hours=args.tz)
    end = day + timedelta(hours=22)
    run = RunConfig(
        "simulate-day",
        {
            "lat": args.lat,
            "lon": args.lon,
            "date": args.date,
            "tz": args.tz,
            "scene_seed": args.scene_seed,
            "strategies": args.strategies,
            "interval": args.interval,
            "locations": args.locations,
            "grid_size": args.grid_size,
        },
    )
    out = _out_dir(args)
    if args.locations > 1:
        results = canyon_batch(
            site, end, args.locations, args.scene_seed, grid, interval_minutes=args.interval
        )
        export_summary_csv(results, out / "summary.csv", run.serialized())
        export_histograms(results, out / "histograms.csv", run.serialized())
        plot_batch_histograms(results, out / "histograms.png")
        means = {}
        for rows in results.values():
            for r in rows:
                means.setdefault(r.strategy, []).append(r.pct_of_optimal)
        for kind, vals in means.items():
            print(f"{kind:15s} mean {np.mean(vals):7.2f} % of optimal over {len(vals)} locations")
        return 0
    kinds = args.strategies.split(",")
    if "optimal" not in kinds:
        kinds.append("optimal")
    strategies = [
        Strategy(k, latitude_deg=args.lat) if k == "fixed_latitude" else Strategy(k) for k in kinds
    ]
    seq = day_sequence(site, end, args.interval, SkyParams(), grid)
    rows = compare_day(seq, strategies)
    ledgers = [simulate_day(seq, s) for s in strategies if s.kind != "optimal"]
    for led in ledgers:
        export_ledger_csv(led, out / f"ledger_{led.strategy}.csv", run.serialized())
    export_summary_csv({"site": rows}, out / "summary.csv", run.serialized())
    plot_day_ledgers(ledgers, out / "day.png")
    for r in rows:
        print(
            f"{r.strategy:15s} net {r.net_j:12.1f} J  ({r.pct_of_optimal:.2f} % of optimal)"
        )
    return 0


def cmd_scalespace(args) -> int:
    tilts = [float(t) for t in args.tilts.split(",")]
    radiance = profile_corpus_radiance(args.profile_seed, samples=args.samples)
    run = RunConfig(
        "scalespace",
        {
            "profile_seed": args.profile_seed,
            "tilts": args.tilts,
            "samples": args.samples,
        },
    )
    out = _out_dir(args)
    profiles = []
    for tilt in tilts:
        p = blur_profile(make_profile(radiance, tilt))
        profiles.append(p)
        export_profile_csv(p, out / f"profile_tilt{tilt:g}.csv", run.serialized())
        print(f"tilt {tilt:5.1f} deg: {count_modes_1d(p.blurred)} blurred modes")
    plot_scalespace(profiles, out / "scalespace.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heliotrope", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("orient", help="run the photodifferential controller on one scene")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--map", help="path to a grayscale PFM radiance map")
    g.add_argument("--recipe", help="'uniform', 'sun:ZEN,AZ', or an integer scene seed")
    p.add_argument("--start", default="0,0", help="start orientation 'zenith,azimuth' in degrees")
    p.add_argument("--delta-theta", type=float, default=45.0)
    p.add_argument("--step", type=float, default=5.0)
    p.add_argument("--threshold", type=float, default=0.01)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--grid-size", type=int, default=128)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_orient)

    p = sub.add_parser("sweep-tilt", help="mean %% of optimal vs detector tilt over a corpus")
    p.add_argument("--corpus-seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--corpus", choices=["unimodal", "multimodal", "mixed"], default="mixed")
    p.add_argument("--tilts", default="5,15,30,45,60,90")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-size", type=int, default=128)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_sweep_tilt)

    p = sub.add_parser("benchmark", help="compare sensing strategies on a static corpus")
    p.add_argument("--corpus-seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--corpus", choices=["mixed", "uniform"], default="mixed")
    p.add_argument(
        "--strategies", default="tetrahedron,shading_wall,fixed_up,geodesic_dome,proposed"
    )
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-size", type=int, default=128)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("simulate-day", help="energy ledger over a simulated clear or canyon day")
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--date", required=True, help="YYYY-MM-DD (local)")
    p.add_argument("--tz", type=float, default=0.0, help="UTC offset hours")
    p.add_argument("--scene-seed", type=int, default=0)
    p.add_argument("--strategies", default="proposed,sun_tracker,fixed_latitude")
    p.add_argument("--interval", type=float, default=10.0, help="minutes between reorientations")
    p.add_argument("--locations", type=int, default=1, help=">1 runs a seeded canyon batch")
    p.add_argument("--grid-size", type=int, default=64)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate_day)

    p = sub.add_parser("scalespace", help="1D scale-space diagnostic profiles")
    p.add_argument("--profile-seed", type=int, default=0)
    p.add_argument("--tilts", default="5,45,90")
    p.add_argument("--samples", type=int, default=1440)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_scalespace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
