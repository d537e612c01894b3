"""Solar ephemeris and an analytic clear-sky radiance generator.

Sun position follows the astronomical-almanac style algorithm (mean
longitude / mean anomaly / ecliptic longitude, then equatorial to
horizontal coordinates via sidereal time), good to a few hundredths of a
degree over 1950-2050.  The sky model is deliberately simple: a sun
disk, a diffuse sky with circumsolar brightening normalized to a target
horizontal irradiance, and a uniform ground hemisphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from .environment import OccluderMask, RadianceMap, SUN_DISK_RADIUS_DEG, sun_disk_radiance
from .sphere import SphereGrid, direction_from_angles

HORIZON_DIP_DEG = 0.6  # fixed refraction-style horizon correction


@dataclass(frozen=True)
class GeoTime:
    """A site (degrees) and an instant; naive timestamps use tz_offset_hours."""

    latitude_deg: float
    longitude_deg: float
    timestamp: datetime
    tz_offset_hours: float = 0.0

    def __post_init__(self):
        if abs(self.latitude_deg) > 90.0 or abs(self.longitude_deg) > 180.0:
            raise ValueError("latitude/longitude out of range")
        if not (1950 <= self.utc().year <= 2050):
            raise ValueError("timestamp outside the supported era (1950-2050)")

    def utc(self) -> datetime:
        ts = self.timestamp
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone(timedelta(hours=self.tz_offset_hours)))
        return ts.astimezone(timezone.utc)

    def at(self, ts: datetime) -> "GeoTime":
        return GeoTime(self.latitude_deg, self.longitude_deg, ts, self.tz_offset_hours)


def _julian_day(utc: datetime) -> float:
    return utc.timestamp() / 86400.0 + 2440587.5


def sun_elevation_azimuth(gt: GeoTime) -> tuple[float, float]:
    """Geometric solar elevation and compass azimuth (degrees, N=0, E=90)."""
    utc = gt.utc()
    n = _julian_day(utc) - 2451545.0
    mnlong = (280.460 + 0.9856474 * n) % 360.0
    g = np.deg2rad((357.528 + 0.9856003 * n) % 360.0)
    lam = np.deg2rad((mnlong + 1.915 * np.sin(g) + 0.020 * np.sin(2.0 * g)) % 360.0)
    ep = np.deg2rad(23.439 - 0.0000004 * n)
    ra = np.arctan2(np.cos(ep) * np.sin(lam), np.cos(lam))
    dec = np.arcsin(np.sin(ep) * np.sin(lam))
    hour_ut = utc.hour + utc.minute / 60.0 + utc.second / 3600.0 + utc.microsecond / 3.6e9
    gmst = (6.697375 + 0.0657098242 * (n - hour_ut / 24.0) + 1.00273790935 * hour_ut) % 24.0
    lmst = np.deg2rad(((gmst + gt.longitude_deg / 15.0) % 24.0) * 15.0)
    ha = lmst - ra
    lat = np.deg2rad(gt.latitude_deg)
    sin_el = np.sin(dec) * np.sin(lat) + np.cos(dec) * np.cos(lat) * np.cos(ha)
    el = np.arcsin(np.clip(sin_el, -1.0, 1.0))
    az = np.arctan2(
        -np.cos(dec) * np.sin(ha),
        np.sin(dec) * np.cos(lat) - np.cos(dec) * np.sin(lat) * np.cos(ha),
    )
    return float(np.degrees(el)), float(np.degrees(az) % 360.0)


def sun_direction(gt: GeoTime) -> np.ndarray | None:
    """Unit vector to the sun in local (east, north, up) coordinates.

    Returns None (below horizon) once the geometric elevation drops under
    the fixed horizon correction.
    """
    el, az = sun_elevation_azimuth(gt)
    if el < -HORIZON_DIP_DEG:
        return None
    # compass azimuth (from north, eastward) -> package azimuth (from +x=east, CCW)
    phi = (90.0 - az) % 360.0
    return direction_from_angles(90.0 - el, phi)


@dataclass(frozen=True)
class SkyParams:
    clarity: float = 1.0  # circumsolar brightening strength
    direct_normal_w_m2: float = 900.0
    diffuse_horizontal_w_m2: float = 100.0
    ground_albedo: float = 0.2

    def __post_init__(self):
        if self.direct_normal_w_m2 < 0.0 or self.diffuse_horizontal_w_m2 < 0.0:
            raise ValueError("irradiances must be >= 0")
        if not (0.0 <= self.ground_albedo <= 1.0):
            raise ValueError("albedo must be in [0, 1]")


def clear_sky_map(
    gt: GeoTime,
    params: SkyParams,
    grid: SphereGrid,
    occluders: tuple[OccluderMask, ...] = (),
    diffuse_scale: float = 1.0,
) -> RadianceMap:
    """Analytic clear-sky radiance: sun disk + diffuse sky + ground.

    The diffuse sky is normalized so its cosine-weighted horizontal
    integral equals the diffuse horizontal irradiance (before masks);
    occluder masks replace sky texels with a dim building radiance.
    """
    el, az = sun_elevation_azimuth(gt)
    sun = sun_direction(gt)
    dirs = grid.directions
    sky = dirs[:, 2] > 0.0
    dhi = params.diffuse_horizontal_w_m2 * diffuse_scale
    values = np.zeros(len(dirs))
    if dhi > 0.0:
        weight = np.ones(len(dirs))
        if sun is not None:
            gamma = np.degrees(np.arccos(np.clip(dirs @ sun, -1.0, 1.0)))
            weight = 1.0 + params.clarity * np.exp(-gamma / 30.0)
        weight = np.where(sky, weight, 0.0)
        horiz = float(np.sum(weight * np.maximum(dirs[:, 2], 0.0) * grid.solid_angles))
        values += weight * (dhi / horiz)
    direct = params.direct_normal_w_m2 if el > 0.0 else 0.0
    if direct > 0.0 and sun is not None:
        disk = sun_disk_radiance(sun, grid, direct, SUN_DISK_RADIUS_DEG)
        values += disk.values.reshape(-1)
    # occluders: buildings replace whatever sky they cover
    building = np.zeros(len(dirs), dtype=bool)
    for occ in occluders:
        building |= occ.selects(grid).reshape(-1) & sky
        values = np.where(building, occ.factor * dhi / np.pi, values)
    # ground hemisphere lit by the (unoccluded) horizontal irradiance
    ghi = direct * max(np.sin(np.deg2rad(el)), 0.0) + dhi
    values = np.where(~sky, params.ground_albedo * ghi / np.pi, values)
    return RadianceMap(grid, values.reshape(grid.shape))


@dataclass(eq=False)
class DaySequence:
    site: GeoTime  # timestamp field marks the sequence start
    entries: list[tuple[datetime, RadianceMap]]
    interval_minutes: float


def day_sequence(
    start: GeoTime,
    end_timestamp: datetime,
    interval_minutes: float,
    params: SkyParams,
    grid: SphereGrid,
    occluders: tuple[OccluderMask, ...] = (),
) -> DaySequence:
    """One map per interval boundary, inclusive of both ends.

    Below the horizon only a twilight diffuse term remains, ramped
    linearly to zero between elevation 0 and -6 degrees.
    """
    if interval_minutes <= 0.0:
        raise ValueError("interval must be > 0")
    t0 = start.utc()
    t1 = GeoTime(start.latitude_deg, start.longitude_deg, end_timestamp, start.tz_offset_hours).utc()
    if not t0 < t1:
        raise ValueError("start must precede end")
    entries = []
    t = t0
    while t <= t1 + timedelta(seconds=1):
        gt = start.at(t)
        el, _ = sun_elevation_azimuth(gt)
        twilight = float(np.clip((el + 6.0) / 6.0, 0.0, 1.0)) if el < 0.0 else 1.0
        entries.append((t, clear_sky_map(gt, params, grid, occluders, diffuse_scale=twilight)))
        t = t + timedelta(minutes=interval_minutes)
    return DaySequence(site=start, entries=entries, interval_minutes=interval_minutes)
