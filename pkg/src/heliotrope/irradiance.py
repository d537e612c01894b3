"""Total irradiance of an oriented panel and the full irradiance field.

The irradiance of a panel with unit normal n is the cosine-clipped
integral of scene radiance over the visible hemisphere,

    E(n) = sum_texels L(s) * max(n . s, 0) * domega(s),

evaluated by direct texel quadrature.  The field sampled over all upper
hemisphere normals is smooth (the clipped-cosine kernel is a low-pass
filter) but can still carry several local maxima; the brute-force argmax
over the field serves as the global-optimum oracle for every controller
and strategy in the package.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .environment import RadianceMap
from .sphere import Orientation, angle_between, direction_from_angles

_CHUNK = 4096  # normals per matmul block when sampling a field


def total_irradiance(rmap: RadianceMap, orientation: Orientation) -> float:
    """Irradiance in W/m^2 for one panel orientation."""
    return total_irradiance_normals(rmap, orientation.normal[None, :])[0]


def total_irradiance_normals(rmap: RadianceMap, normals: np.ndarray) -> np.ndarray:
    """Vectorized irradiance for an (N, 3) array of unit normals."""
    cosines = rmap.grid.directions @ np.asarray(normals, dtype=float).T
    np.maximum(cosines, 0.0, out=cosines)
    return rmap.weighted_flat @ cosines


@dataclass(eq=False)
class IrradianceField:
    """Dense sampling of E(n) over the upper hemisphere of panel normals.

    zenith_deg has Z entries covering [0, 90]; azimuth_deg has A entries
    covering [0, 360); values has shape (Z, A) in W/m^2.
    """

    zenith_deg: np.ndarray
    azimuth_deg: np.ndarray
    values: np.ndarray
    source: RadianceMap | None = None

    def orientation_at(self, iz: int, ia: int) -> Orientation:
        return Orientation.from_normal(
            direction_from_angles(self.zenith_deg[iz], self.azimuth_deg[ia])
        )


def irradiance_field(
    rmap: RadianceMap, zenith_steps: int = 91, azimuth_steps: int = 360
) -> IrradianceField:
    """Sample the irradiance over a (zenith x azimuth) grid of normals."""
    if zenith_steps < 2 or azimuth_steps < 2:
        raise ValueError("need at least 2 steps per axis")
    zen = np.linspace(0.0, 90.0, zenith_steps)
    az = np.arange(azimuth_steps) * (360.0 / azimuth_steps)
    zz, aa = np.meshgrid(np.deg2rad(zen), np.deg2rad(az), indexing="ij")
    normals = np.stack(
        [np.sin(zz) * np.cos(aa), np.sin(zz) * np.sin(aa), np.cos(zz)], axis=-1
    ).reshape(-1, 3)
    out = np.empty(len(normals))
    for i in range(0, len(normals), _CHUNK):
        out[i : i + _CHUNK] = total_irradiance_normals(rmap, normals[i : i + _CHUNK])
    return IrradianceField(zen, az, out.reshape(zenith_steps, azimuth_steps), source=rmap)


def global_optimum(field: IrradianceField) -> tuple[Orientation, float]:
    """Brute-force argmax of the field with two rounds of local refinement.

    Ties break to the smallest zenith angle, then the smallest azimuth.
    Refinement needs the source map; without it the grid argmax is
    returned as-is.
    """
    vals = field.values
    if vals.size == 0:
        raise ValueError("empty field")
    best = np.max(vals)
    ties = np.argwhere(vals >= best - 1e-12 * max(abs(best), 1.0))
    iz, ia = min(ties, key=lambda t: (field.zenith_deg[t[0]], field.azimuth_deg[t[1]]))
    zen, az = float(field.zenith_deg[iz]), float(field.azimuth_deg[ia])
    value = float(vals[iz, ia])
    if field.source is None:
        return Orientation.from_normal(direction_from_angles(zen, az)), value
    dz = float(field.zenith_deg[1] - field.zenith_deg[0])
    da = float(field.azimuth_deg[1] - field.azimuth_deg[0])
    for _ in range(2):
        dz, da = dz / 2.0, da / 2.0
        cand = []
        for oz in (-1, 0, 1):
            for oa in (-1, 0, 1):
                z = float(np.clip(zen + oz * dz, 0.0, 90.0))
                a = (az + oa * da) % 360.0
                o = Orientation.from_normal(direction_from_angles(z, a))
                cand.append((total_irradiance(field.source, o), -z, -a, z, a))
        e, _, _, zen, az = max(cand)
        value = max(value, float(e))
    return Orientation.from_normal(direction_from_angles(zen, az)), value


def count_local_maxima(field: IrradianceField, merge_deg: float = 5.0) -> int:
    """Strict local maxima of the field, merged within a great-circle radius.

    The azimuth axis wraps; the zenith axis does not.  An all-equal plateau
    counts as one maximum (the degenerate contract).
    """
    vals = field.values
    rng = float(np.max(vals) - np.min(vals))
    if rng <= 1e-12 * max(abs(float(np.max(vals))), 1.0):
        return 1
    # strictly greater than every existing 8-neighbor
    neighbor_max = -np.inf * np.ones_like(vals)
    for oz in (-1, 0, 1):
        for oa in (-1, 0, 1):
            if oz == 0 and oa == 0:
                continue
            shifted = np.roll(vals, -oa, axis=1)
            if oz == -1:
                sh = np.vstack([np.full((1, vals.shape[1]), -np.inf), shifted[:-1]])
            elif oz == 1:
                sh = np.vstack([shifted[1:], np.full((1, vals.shape[1]), -np.inf)])
            else:
                sh = shifted
            np.maximum(neighbor_max, sh, out=neighbor_max)
    peaks = np.argwhere(vals > neighbor_max)
    if len(peaks) == 0:
        return 1
    # merge nearby peaks, strongest first
    peaks = sorted(
        peaks, key=lambda p: (-vals[p[0], p[1]], field.zenith_deg[p[0]], field.azimuth_deg[p[1]])
    )
    kept: list[np.ndarray] = []
    for p in peaks:
        d = direction_from_angles(field.zenith_deg[p[0]], field.azimuth_deg[p[1]])
        if all(angle_between(d, q) >= merge_deg for q in kept):
            kept.append(d)
    return len(kept)


def export_field_csv(field: IrradianceField, path, header_comment: str | None = None) -> None:
    """Write the field as zenith-major CSV rows."""
    with open(path, "w", newline="") as f:
        if header_comment:
            f.write(f"# {header_comment}\n")
        writer = csv.writer(f)
        writer.writerow(["zenith_deg", "azimuth_deg", "irradiance_w_m2"])
        for iz, zen in enumerate(field.zenith_deg):
            for ia, az in enumerate(field.azimuth_deg):
                writer.writerow([f"{zen:.6g}", f"{az:.6g}", f"{field.values[iz, ia]:.9g}"])
