"""Threshold-gated fixed-step ascent driven by the photodifferential.

Each iteration reads the four tilted detectors; any axis whose
photodifferential magnitude clears a relative threshold is actuated one
fixed step in the sign of the difference.  The loop stops when both axes
are below threshold, when it is detected orbiting a maximum that falls
between step positions, or at the iteration cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import RadianceMap
from .irradiance import global_optimum, irradiance_field, total_irradiance
from .photodiff import read_photodifferential
from .sphere import Orientation, angle_between, fibonacci_starts, rotate_toward


@dataclass(frozen=True)
class ControllerConfig:
    tilt_deg: float = 45.0  # detector tilt
    step_deg: float = 5.0  # actuation step per axis
    threshold: float = 0.01  # relative photodifferential gate
    max_iters: int = 200

    def __post_init__(self):
        if self.step_deg <= 0.0:
            raise ValueError("step must be > 0")
        if not (0.0 < self.tilt_deg <= 90.0):
            raise ValueError("tilt angle must be in (0, 90]")
        if self.threshold < 0.0:
            raise ValueError("threshold must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(eq=False)
class ConvergenceReport:
    final: Orientation
    iterations: int
    trajectory: list[Orientation]
    converged: bool
    final_irradiance: float
    axis_steps: int = 0  # total single-axis actuations taken


def _orbiting(trajectory: list[Orientation], step_deg: float) -> bool:
    """True when the newest orientation re-entered a recent neighborhood.

    Every iteration moves at least one full step, so coming back within
    half a step of a recently visited orientation means the loop is
    circling a maximum that falls between step positions.
    """
    o = trajectory[-1]
    return any(angle_between(o.normal, p.normal) < 0.5 * step_deg for p in trajectory[-10:-2])


def _gated_signs(reading, cfg: ControllerConfig) -> tuple[int, int]:
    """Per-axis actuation signs; 0 when the axis is below threshold.

    The gate compares the raw detector difference |E+ - E-| against
    threshold * mean of the four readings, which keeps the controller
    invariant to radiometric scaling of the scene.
    """
    span = 2.0 * np.deg2rad(cfg.tilt_deg)
    gate = cfg.threshold * reading.mean_raw
    su = int(np.sign(reading.e_d_u)) if abs(reading.e_d_u) * span > gate else 0
    sv = int(np.sign(reading.e_d_v)) if abs(reading.e_d_v) * span > gate else 0
    return su, sv


def orient(rmap: RadianceMap, start: Orientation, cfg: ControllerConfig) -> ConvergenceReport:
    """Run the orientation loop on a static scene."""
    o = start
    trajectory = [o]
    axis_steps = 0
    converged = False
    oscillations = 0
    for _ in range(cfg.max_iters):
        reading = read_photodifferential(rmap, o, cfg.tilt_deg)
        su, sv = _gated_signs(reading, cfg)
        if su == 0 and sv == 0:
            converged = True
            break
        if su != 0:
            o = rotate_toward(o, "u", su * cfg.step_deg)
            axis_steps += 1
        if sv != 0:
            o = rotate_toward(o, "v", sv * cfg.step_deg)
            axis_steps += 1
        trajectory.append(o)
        # after the second orbit detection, park there and call it converged
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


@dataclass(frozen=True)
class SweepResult:
    tilt_deg: float
    mean_pct_of_optimal: float


def sweep_tilt(
    maps: list[RadianceMap],
    tilts_deg: list[float],
    starts_per_map: int = 16,
    cfg: ControllerConfig = ControllerConfig(),
    seed: int = 0,
    field_steps: tuple[int, int] = (91, 360),
) -> list[SweepResult]:
    """Mean percent-of-optimal harvested irradiance per detector tilt angle.

    For each map the controller runs from a seeded spread of starts; the
    averaged converged irradiance is normalized by the brute-force global
    optimum, then averaged across maps.
    """
    if not maps or not tilts_deg:
        raise ValueError("need at least one map and one tilt angle")
    optima = [global_optimum(irradiance_field(m, *field_steps))[1] for m in maps]
    starts = fibonacci_starts(starts_per_map, seed=seed)
    results = []
    for tilt in tilts_deg:
        tilt_cfg = ControllerConfig(
            tilt_deg=tilt,
            step_deg=cfg.step_deg,
            threshold=cfg.threshold,
            max_iters=cfg.max_iters,
        )
        pcts = []
        for rmap, opt in zip(maps, optima):
            finals = [orient(rmap, s, tilt_cfg).final_irradiance for s in starts]
            pcts.append(np.mean(finals) / opt if opt > 0.0 else 1.0)
        results.append(SweepResult(tilt_deg=tilt, mean_pct_of_optimal=100.0 * float(np.mean(pcts))))
    return results
