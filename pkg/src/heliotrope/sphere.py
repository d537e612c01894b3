"""Directions, panel orientations, and quadrature on the unit sphere.

Conventions used throughout the package: +z is the zenith, azimuth is
measured from +x (east) counterclockwise.  Panel orientations carry a
full right-handed triad (u, v, normal) so that actuation is expressed as
rotations about panel-fixed tangent axes, which stays well-conditioned
arbitrarily close to the zenith.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-9


def direction(x: float, y: float, z: float) -> np.ndarray:
    """Unit vector from components, normalized defensively."""
    d = np.array([x, y, z], dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("direction components must be finite and nonzero")
    return d / norm


def direction_from_angles(zenith_deg: float, azimuth_deg: float) -> np.ndarray:
    """Unit vector at the given zenith angle (from +z) and azimuth (from +x)."""
    th = np.deg2rad(zenith_deg)
    ph = np.deg2rad(azimuth_deg)
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def zenith_azimuth_deg(d: np.ndarray) -> tuple[float, float]:
    """Inverse of direction_from_angles; azimuth in [0, 360)."""
    th = np.degrees(np.arccos(np.clip(d[2], -1.0, 1.0)))
    ph = np.degrees(np.arctan2(d[1], d[0])) % 360.0
    return float(th), float(ph)


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Great-circle angle between two unit vectors, in degrees in [0, 180]."""
    return float(np.degrees(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))))


def _rodrigues(axis: np.ndarray, angle_rad: float) -> np.ndarray:
    """Rotation matrix about a unit axis."""
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    x, y, z = axis
    K = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


@dataclass(frozen=True)
class Orientation:
    """Right-handed orthonormal triad (u, v, normal) of a panel or detector.

    With upper_hemisphere=True, rotations that would push the normal below
    the horizon are clamped so the normal stops exactly on the horizon.
    """

    u: np.ndarray
    v: np.ndarray
    normal: np.ndarray
    upper_hemisphere: bool = True

    def __post_init__(self):
        for a, b in ((self.u, self.v), (self.v, self.normal), (self.u, self.normal)):
            if abs(np.dot(a, b)) > 1e-7:
                raise ValueError("triad axes must be orthogonal")
        if np.linalg.norm(np.cross(self.u, self.v) - self.normal) > 1e-7:
            raise ValueError("triad must be right-handed (u x v = normal)")

    @staticmethod
    def from_normal(normal: np.ndarray, upper_hemisphere: bool = True) -> "Orientation":
        """Build a triad with a deterministic tangent frame for the normal."""
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        ref = np.array([1.0, 0.0, 0.0])
        if abs(np.dot(ref, n)) > 0.9:
            ref = np.array([0.0, 1.0, 0.0])
        u = ref - np.dot(ref, n) * n
        u /= np.linalg.norm(u)
        v = np.cross(n, u)
        return Orientation(u=u, v=v, normal=n, upper_hemisphere=upper_hemisphere)

    @staticmethod
    def zenith(upper_hemisphere: bool = True) -> "Orientation":
        return Orientation(
            u=np.array([1.0, 0.0, 0.0]),
            v=np.array([0.0, 1.0, 0.0]),
            normal=np.array([0.0, 0.0, 1.0]),
            upper_hemisphere=upper_hemisphere,
        )


def _orthonormalize(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = u / np.linalg.norm(u)
    v = v - np.dot(v, u) * u
    v /= np.linalg.norm(v)
    return u, v, np.cross(u, v)


def _clamped_angle(n: np.ndarray, axis: np.ndarray, angle_rad: float) -> float:
    """Largest |rotation| <= |angle_rad| (same sign) keeping n.z >= 0.

    n rotated about axis has z-component c*cos(a) + s*sin(a); the clamp is
    the nearest zero of that expression in the direction of rotation.
    """
    c = n[2]
    s = np.cross(axis, n)[2]
    r = np.hypot(c, s)
    if r < 1e-15:
        return angle_rad  # normal stays on the horizon for any angle
    # zeros of r*cos(a - phi) at a = phi +/- pi/2 (mod 2*pi)
    phi = np.arctan2(s, c)
    candidates = []
    for base in (phi - np.pi / 2.0, phi + np.pi / 2.0):
        for k in (-1, 0, 1):
            a = base + 2.0 * np.pi * k
            same_side = a * angle_rad > 0.0 or abs(a) < 1e-12
            if same_side and abs(a) <= abs(angle_rad) + 1e-12:
                candidates.append(a)
    if not candidates:
        return angle_rad
    return min(candidates, key=abs)


def rotate_toward(o: Orientation, axis: str, angle_deg: float) -> Orientation:
    """Rotate the whole triad about its own u or v axis by angle_deg.

    Clamps at the horizon when the orientation is restricted to the upper
    hemisphere; clamping replaces failure.
    """
    if axis not in ("u", "v"):
        raise ValueError(f"axis must be 'u' or 'v', got {axis!r}")
    if not np.isfinite(angle_deg):
        raise ValueError("angle must be finite")
    if angle_deg == 0.0:
        return o
    a = o.u if axis == "u" else o.v
    ang = np.deg2rad(angle_deg)
    n_new = _rodrigues(a, ang) @ o.normal
    if o.upper_hemisphere and n_new[2] < -1e-15:
        ang = _clamped_angle(o.normal, a, ang)
    R = _rodrigues(a, ang)
    u, v, n = _orthonormalize(R @ o.u, R @ o.v)
    return Orientation(u=u, v=v, normal=n, upper_hemisphere=o.upper_hemisphere)


_GRID_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


@dataclass(frozen=True)
class SphereGrid:
    """Equirectangular discretization of the sphere.

    Rows span polar angle theta in [0, pi] (row 0 at the top, near +z),
    columns span azimuth phi in [0, 2*pi); texel centers sit at
    half-integer offsets.  Each texel in row r carries the solid angle
    (2*pi/W) * (pi/H) * sin(theta_r).
    """

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def row_theta(self, row) -> np.ndarray:
        return (np.asarray(row) + 0.5) * np.pi / self.height

    def col_phi(self, col) -> np.ndarray:
        return (np.asarray(col) + 0.5) * 2.0 * np.pi / self.width

    def row_solid_angle(self, row) -> np.ndarray:
        """Solid angle (sr) of one texel in the given row."""
        return (2.0 * np.pi / self.width) * (np.pi / self.height) * np.sin(self.row_theta(row))

    def grid_direction(self, row: int, col: int) -> np.ndarray:
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise IndexError(f"texel ({row}, {col}) out of range for {self.shape}")
        th = self.row_theta(row)
        ph = self.col_phi(col)
        return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])

    def direction_to_texel(self, d: np.ndarray) -> tuple[int, int]:
        th, ph = zenith_azimuth_deg(d)
        row = int(np.radians(th) / np.pi * self.height)
        col = int(np.radians(ph) / (2.0 * np.pi) * self.width)
        return (min(row, self.height - 1), min(col, self.width - 1))

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(H*W, 3) texel-center directions and (H*W,) solid angles, cached."""
        key = (self.width, self.height)
        hit = _GRID_CACHE.get(key)
        if hit is None:
            rows, cols = np.meshgrid(
                np.arange(self.height), np.arange(self.width), indexing="ij"
            )
            th = self.row_theta(rows)
            ph = self.col_phi(cols)
            dirs = np.stack(
                [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
            ).reshape(-1, 3)
            omega = self.row_solid_angle(rows).reshape(-1)
            hit = (dirs, omega)
            _GRID_CACHE[key] = hit
        return hit

    @property
    def directions(self) -> np.ndarray:
        return self._arrays()[0]

    @property
    def solid_angles(self) -> np.ndarray:
        return self._arrays()[1]


def fibonacci_starts(count: int, seed: int = 0) -> list[Orientation]:
    """Seeded Fibonacci-spiral covering of the upper hemisphere.

    Used as the standard set of initial orientations for sweeps and
    benchmarks; the seed rotates the spiral in azimuth so different
    corpora do not share the exact same starts.
    """
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, 360.0)
    golden = 180.0 * (3.0 - np.sqrt(5.0))
    starts = []
    for i in range(count):
        z = 1.0 - (i + 0.5) / count  # covers (0, 1): horizon-ish to near-zenith
        zen = np.degrees(np.arccos(z))
        az = (phase + i * golden) % 360.0
        starts.append(Orientation.from_normal(direction_from_angles(zen, az)))
    return starts
