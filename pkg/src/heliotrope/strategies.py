"""Comparison strategies for orienting a panel with minimal sensing.

Covers the fixed orientations (pointing up, latitude tilt), the
astronomical sun tracker, and three alternative sensor arrangements:
three canted detectors on a tetrahedron, detector pairs flanking a
shading wall, and a 40-detector geodesic dome argmax.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .controller import (
    ControllerConfig,
    ConvergenceReport,
    _orbiting,
    orient as orient_proposed,
)
from .environment import RadianceMap
from .irradiance import global_optimum, irradiance_field, total_irradiance
from .sphere import (
    Orientation,
    angle_between,
    direction_from_angles,
    fibonacci_starts,
    rotate_toward,
)

SENSOR_COUNTS = {
    "tetrahedron": 3,
    "shading_wall": 4,
    "fixed_up": 0,
    "fixed_latitude": 0,
    "geodesic_dome": 40,
    "proposed": 4,
}

TETRAHEDRON_TILT_DEG = np.degrees(np.arccos(1.0 / 3.0))  # 70.53: regular tetrahedron faces


@dataclass(frozen=True)
class Strategy:
    kind: str
    latitude_deg: float = 0.0
    wall_height_ratio: float = 1.0
    config: ControllerConfig = dc_field(default_factory=ControllerConfig)

    def __post_init__(self):
        if self.kind not in SENSOR_COUNTS and self.kind not in ("sun_tracker", "optimal"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")


def fixed_orientation(kind: str, latitude_deg: float = 0.0) -> Orientation:
    """Zenith normal, or the latitude-tilt rule: toward the equator with
    zenith angle equal to |latitude|."""
    if kind == "fixed_up" or latitude_deg == 0.0:
        return Orientation.zenith()
    if abs(latitude_deg) > 90.0:
        raise ValueError("latitude out of range")
    # azimuth convention: +x east, +y north; equator-facing is due south
    # (azimuth 270) in the northern hemisphere, due north (90) in the southern
    azimuth = 270.0 if latitude_deg > 0.0 else 90.0
    return Orientation.from_normal(direction_from_angles(abs(latitude_deg), azimuth))


def orient_tetrahedron(
    rmap: RadianceMap, start: Orientation, cfg: ControllerConfig
) -> ConvergenceReport:
    """Tilt toward the brightest of three canted detectors until balanced.

    Detector normals sit at the tetrahedron face tilt from the panel
    normal, 120 degrees apart in panel azimuth, rotating rigidly with the
    panel.
    """
    o = start
    trajectory = [o]
    axis_steps = 0
    converged = False
    oscillations = 0
    for _ in range(cfg.max_iters):
        dets = _tetrahedron_detectors(o)
        readings = [total_irradiance(rmap, d) for d in dets]
        mean = float(np.mean(readings))
        spread = max(readings) - min(readings)
        if mean <= 0.0 or spread < cfg.threshold * mean:
            converged = True
            break
        target = dets[int(np.argmax(readings))].normal
        o = _step_toward(o, target, cfg.step_deg)
        trajectory.append(o)
        axis_steps += 1
        if _orbiting(trajectory, cfg.step_deg):
            oscillations += 1
            if oscillations >= 2:
                converged = True
                break
    return ConvergenceReport(
        final=o,
        iterations=len(trajectory) - 1,
        trajectory=trajectory,
        converged=converged,
        final_irradiance=total_irradiance(rmap, o),
        axis_steps=axis_steps,
    )


def _tetrahedron_detectors(panel: Orientation) -> list[Orientation]:
    dets = []
    tilt = np.deg2rad(TETRAHEDRON_TILT_DEG)
    for az in (0.0, 120.0, 240.0):
        c, s = np.cos(np.deg2rad(az)), np.sin(np.deg2rad(az))
        axis_dir = c * panel.u + s * panel.v
        # tilt the normal away from the panel within the (axis_dir, normal) plane
        n = np.cos(tilt) * panel.normal + np.sin(tilt) * axis_dir
        dets.append(Orientation.from_normal(n, upper_hemisphere=False))
    return dets


def _step_toward(o: Orientation, target_normal: np.ndarray, step_deg: float) -> Orientation:
    """Rotate the panel one fixed step along the great circle to a target."""
    gamma = angle_between(o.normal, target_normal)
    if gamma < 1e-9:
        return o
    # decompose the move into the panel's u/v rotations
    t_u = float(np.dot(target_normal, o.u))
    t_v = float(np.dot(target_normal, o.v))
    ang = np.arctan2(t_v, t_u)
    step = min(step_deg, gamma)
    # rotating about +v moves the normal toward +u; about -u toward +v
    o = rotate_toward(o, "v", step * np.cos(ang))
    o = rotate_toward(o, "u", -step * np.sin(ang))
    return o


def _wall_pair_readings(
    rmap: RadianceMap, panel: Orientation, axis: np.ndarray
) -> tuple[float, float]:
    """Irradiance of two coplanar detectors flanking an opaque half-plane wall.

    The wall contains the panel normal and is perpendicular to `axis`;
    each detector integrates only the directions on its own side.
    """
    dirs = rmap.grid.directions
    cosines = np.maximum(dirs @ panel.normal, 0.0)
    side = dirs @ axis
    w = rmap.weighted_flat
    plus = float(np.sum(w * cosines * (side > 0.0)))
    minus = float(np.sum(w * cosines * (side < 0.0)))
    return plus, minus


def orient_shading_wall(
    rmap: RadianceMap, start: Orientation, cfg: ControllerConfig
) -> ConvergenceReport:
    """Per axis, balance the two detectors separated by the shading wall."""
    o = start
    trajectory = [o]
    axis_steps = 0
    converged = False
    oscillations = 0
    for _ in range(cfg.max_iters):
        up, um = _wall_pair_readings(rmap, o, o.u)
        vp, vm = _wall_pair_readings(rmap, o, o.v)
        mean = (up + um + vp + vm) / 4.0
        gate = cfg.threshold * mean
        du, dv = up - um, vp - vm
        su = int(np.sign(du)) if abs(du) > gate else 0
        sv = int(np.sign(dv)) if abs(dv) > gate else 0
        if (su == 0 and sv == 0) or mean <= 0.0:
            converged = True
            break
        # brighter +u side: rotate the normal toward +u, i.e. about +v
        if su != 0:
            o = rotate_toward(o, "v", su * cfg.step_deg)
            axis_steps += 1
        if sv != 0:
            o = rotate_toward(o, "u", -sv * cfg.step_deg)
            axis_steps += 1
        trajectory.append(o)
        if _orbiting(trajectory, cfg.step_deg):
            oscillations += 1
            if oscillations >= 2:
                converged = True
                break
    return ConvergenceReport(
        final=o,
        iterations=len(trajectory) - 1,
        trajectory=trajectory,
        converged=converged,
        final_irradiance=total_irradiance(rmap, o),
        axis_steps=axis_steps,
    )


def dome_directions() -> list[np.ndarray]:
    """40 fixed detector directions: zenith plus three staggered rings."""
    dirs = [direction_from_angles(0.0, 0.0)]
    for count, zen, stagger in ((8, 25.0, 0.0), (14, 50.0, 12.857), (17, 75.0, 5.294)):
        for i in range(count):
            dirs.append(direction_from_angles(zen, stagger + i * 360.0 / count))
    return dirs


def orient_geodesic_dome(rmap: RadianceMap) -> Orientation:
    """Single-step argmax over the dome detectors; ties to smallest zenith."""
    dirs = dome_directions()
    readings = [total_irradiance(rmap, Orientation.from_normal(d)) for d in dirs]
    best = max(readings)
    tol = 1e-12 * max(abs(best), 1.0)
    candidates = [d for d, r in zip(dirs, readings) if r >= best - tol]
    winner = min(candidates, key=lambda d: -d[2])  # largest z = smallest zenith
    return Orientation.from_normal(winner)


def run_strategy(
    strategy: Strategy, rmap: RadianceMap, start: Orientation
) -> tuple[Orientation, float]:
    """Final orientation and its irradiance for one static scene."""
    if strategy.kind == "fixed_up":
        o = fixed_orientation("fixed_up")
    elif strategy.kind == "fixed_latitude":
        o = fixed_orientation("fixed_latitude", strategy.latitude_deg)
    elif strategy.kind == "geodesic_dome":
        o = orient_geodesic_dome(rmap)
    elif strategy.kind == "tetrahedron":
        o = orient_tetrahedron(rmap, start, strategy.config).final
    elif strategy.kind == "shading_wall":
        o = orient_shading_wall(rmap, start, strategy.config).final
    elif strategy.kind == "proposed":
        o = orient_proposed(rmap, start, strategy.config).final
    else:
        raise ValueError(f"strategy {strategy.kind!r} needs timestamps; not usable statically")
    return o, total_irradiance(rmap, o)


@dataclass(frozen=True)
class BenchmarkRow:
    strategy: str
    mean_pct_of_optimal: float
    num_sensors: int


def benchmark(
    maps: list[RadianceMap],
    strategies: list[Strategy],
    starts_per_map: int = 16,
    seed: int = 0,
    field_steps: tuple[int, int] = (91, 360),
) -> list[BenchmarkRow]:
    """Mean percent-of-optimal per strategy over a static-scene corpus."""
    if not maps or not strategies:
        raise ValueError("need maps and strategies")
    optima = [global_optimum(irradiance_field(m, *field_steps))[1] for m in maps]
    starts = fibonacci_starts(starts_per_map, seed=seed)
    rows = []
    for strategy in strategies:
        iterative = strategy.kind in ("tetrahedron", "shading_wall", "proposed")
        pcts = []
        for rmap, opt in zip(maps, optima):
            if opt <= 0.0:
                pcts.append(1.0)
                continue
            if iterative:
                vals = [run_strategy(strategy, rmap, s)[1] for s in starts]
                pcts.append(float(np.mean(vals)) / opt)
            else:
                pcts.append(run_strategy(strategy, rmap, starts[0])[1] / opt)
        rows.append(
            BenchmarkRow(
                strategy=strategy.kind,
                mean_pct_of_optimal=100.0 * float(np.mean(pcts)),
                num_sensors=SENSOR_COUNTS[strategy.kind],
            )
        )
    return rows
