"""Scene radiance maps: PFM file I/O and seeded synthetic scene generation.

A RadianceMap holds one scalar radiance value (W/(m^2 sr)) per texel of a
full equirectangular panorama (width = 2 * height).  Synthetic scenes are
built from smooth angular lobes, a uniform ambient term, and rectangular
occluder masks in (theta, phi), all deterministic in the recipe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sphere import SphereGrid, direction_from_angles

SUN_DISK_RADIUS_DEG = 0.266  # physical angular radius of the solar disk


class RadianceMapError(ValueError):
    """Malformed radiance map file or invalid texel data."""


@dataclass(eq=False)
class RadianceMap:
    """Immutable-by-convention equirectangular radiance map.

    values has shape (H, W); row 0 is the top of the panorama (near +z).
    """

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise RadianceMapError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.grid.width != 2 * self.grid.height:
            raise RadianceMapError(
                f"expected full panorama with W = 2H, got {self.grid.width}x{self.grid.height}"
            )
        bad = ~np.isfinite(self.values) | (self.values < 0.0)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise RadianceMapError(
                f"non-finite or negative radiance at texel (row={r}, col={c}): "
                f"{self.values[r, c]}"
            )
        self.values.setflags(write=False)

    @property
    def weighted_flat(self) -> np.ndarray:
        """Flattened radiance * per-texel solid angle, cached for quadrature."""
        w = getattr(self, "_weighted_flat", None)
        if w is None:
            w = self.values.reshape(-1) * self.grid.solid_angles
            object.__setattr__(self, "_weighted_flat", w)
        return w

    def scaled(self, factor: float) -> "RadianceMap":
        return RadianceMap(self.grid, self.values * factor)

    def __add__(self, other: "RadianceMap") -> "RadianceMap":
        if other.grid != self.grid:
            raise RadianceMapError("cannot add maps on different grids")
        return RadianceMap(self.grid, self.values + other.values)


def load_radiance_map(path) -> RadianceMap:
    """Read a grayscale PFM file (header 'Pf', W H, scale, raw float32 rows).

    The scale line's sign selects endianness (negative = little-endian);
    rows are stored bottom-first per the PFM convention.
    """
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"Pf":
            raise RadianceMapError(f"not a grayscale PFM file (header {magic!r})")
        dims = f.readline().split()
        if len(dims) != 2:
            raise RadianceMapError("malformed PFM dimension line")
        width, height = int(dims[0]), int(dims[1])
        scale = float(f.readline().strip())
        if scale == 0.0:
            raise RadianceMapError("PFM scale must be nonzero")
        endian = "<" if scale < 0.0 else ">"
        count = width * height
        raw = f.read(4 * count)
        if len(raw) != 4 * count:
            raise RadianceMapError("truncated PFM payload")
    data = np.frombuffer(raw, dtype=np.dtype(endian + "f4")).astype(np.float64)
    data = data.reshape(height, width)[::-1, :] * abs(scale)
    if width != 2 * height:
        raise RadianceMapError(f"dimension mismatch: W={width} is not 2*H={2 * height}")
    return RadianceMap(SphereGrid(width, height), data)


def save_radiance_map(path, rmap: RadianceMap) -> None:
    """Write the grayscale little-endian PFM, inverse of load_radiance_map."""
    h, w = rmap.grid.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode())
        f.write(b"-1.0\n")
        f.write(rmap.values[::-1, :].astype("<f4").tobytes())


@dataclass(frozen=True)
class OccluderMask:
    """Rectangular mask in (theta, phi), multiplying radiance by a factor.

    The azimuth interval may wrap through 360; factor < 1 darkens the
    region (a building silhouette), factor = 0 blacks it out.
    """

    theta_min_deg: float
    theta_max_deg: float
    phi_min_deg: float
    phi_max_deg: float
    factor: float = 0.0

    def selects(self, grid: SphereGrid) -> np.ndarray:
        rows = np.arange(grid.height)
        cols = np.arange(grid.width)
        th = np.degrees(grid.row_theta(rows))
        ph = np.degrees(grid.col_phi(cols))
        in_th = (th >= self.theta_min_deg) & (th <= self.theta_max_deg)
        if self.phi_max_deg - self.phi_min_deg >= 360.0:
            return np.outer(in_th, np.ones(grid.width, dtype=bool))
        lo, hi = self.phi_min_deg % 360.0, self.phi_max_deg % 360.0
        if lo <= hi:
            in_ph = (ph >= lo) & (ph <= hi)
        else:
            in_ph = (ph >= lo) | (ph <= hi)
        return np.outer(in_th, in_ph)


@dataclass(frozen=True)
class Lobe:
    """Smooth radiance lobe: peak * exp(-(angle_to_center / width)^2)."""

    zenith_deg: float
    azimuth_deg: float
    width_deg: float
    peak: float

    def __post_init__(self):
        if self.width_deg <= 0.0 or self.peak < 0.0:
            raise ValueError("lobe width must be > 0 and peak >= 0")


@dataclass(frozen=True)
class SceneRecipe:
    """Deterministic description of a synthetic scene."""

    seed: int = 0
    lobes: tuple[Lobe, ...] = ()
    ambient: float = 0.0
    occluders: tuple[OccluderMask, ...] = ()

    def __post_init__(self):
        if self.ambient < 0.0:
            raise ValueError("ambient radiance must be >= 0")


def synth_scene(recipe: SceneRecipe, grid: SphereGrid) -> RadianceMap:
    """Render a recipe to a radiance map; bit-identical for identical inputs."""
    values = np.full(grid.shape, float(recipe.ambient))
    dirs = grid.directions
    for lobe in recipe.lobes:
        center = direction_from_angles(lobe.zenith_deg, lobe.azimuth_deg)
        cosg = np.clip(dirs @ center, -1.0, 1.0)
        gamma = np.degrees(np.arccos(cosg))
        values += lobe.peak * np.exp(-((gamma / lobe.width_deg) ** 2)).reshape(grid.shape)
    for occ in recipe.occluders:
        mask = occ.selects(grid)
        values = np.where(mask, values * occ.factor, values)
    return RadianceMap(grid, values)


def sun_disk_radiance(
    sun_direction: np.ndarray,
    grid: SphereGrid,
    total_irradiance_at_normal: float,
    disk_radius_deg: float = SUN_DISK_RADIUS_DEG,
) -> RadianceMap:
    """Paint a uniform sun disk delivering the given irradiance to a sun-facing panel.

    The painted radiance is normalized against the grid's own quadrature of
    the covered texels, so the target irradiance is met at any resolution
    even when the disk is smaller than a texel (the nearest texel is then
    used as the whole disk).
    """
    if disk_radius_deg <= 0.0:
        raise ValueError("disk radius must be > 0")
    if total_irradiance_at_normal < 0.0:
        raise ValueError("irradiance must be >= 0")
    dirs = grid.directions
    cosg = dirs @ sun_direction
    inside = cosg >= np.cos(np.deg2rad(disk_radius_deg))
    if not inside.any():
        inside = np.zeros(len(dirs), dtype=bool)
        inside[int(np.argmax(cosg))] = True
    weight = np.where(inside, np.maximum(cosg, 0.0) * grid.solid_angles, 0.0).sum()
    values = np.zeros(len(dirs))
    if weight > 0.0 and total_irradiance_at_normal > 0.0:
        values[inside] = total_irradiance_at_normal / weight
    return RadianceMap(grid, values.reshape(grid.shape))


# ---------------------------------------------------------------------------
# Seeded corpora: synthetic stand-ins for captured urban lighting scenes.

def unimodal_recipe(seed: int) -> SceneRecipe:
    """One dominant lobe plus faint ambient; irradiance field is unimodal."""
    rng = np.random.default_rng(seed)
    lobe = Lobe(
        zenith_deg=float(rng.uniform(10.0, 70.0)),
        azimuth_deg=float(rng.uniform(0.0, 360.0)),
        width_deg=float(rng.uniform(15.0, 40.0)),
        peak=float(rng.uniform(5.0, 10.0)),
    )
    return SceneRecipe(seed=seed, lobes=(lobe,), ambient=float(rng.uniform(0.0, 0.05)))


def multimodal_recipe(seed: int) -> SceneRecipe:
    """A dominant lobe plus 1-2 weaker lobes on the far side of the sky.

    Minor lobes sit more than about 100 degrees of great-circle angle from
    the dominant one, so a panel facing a minor lobe no longer sees the
    dominant lobe at all: the irradiance field gains genuine local maxima
    (a bright sky patch with dimmer building reflections opposite it).
    Integrated flux of each minor lobe is a fraction of the dominant
    lobe's, keeping the dominant direction globally optimal.
    """
    rng = np.random.default_rng(seed)
    n_minor = int(rng.integers(1, 3))
    main_az = float(rng.uniform(0.0, 360.0))
    main_zen = float(rng.uniform(15.0, 40.0))
    main_width = float(rng.uniform(14.0, 22.0))
    main_peak = float(rng.uniform(8.0, 12.0))
    lobes = [Lobe(zenith_deg=main_zen, azimuth_deg=main_az, width_deg=main_width, peak=main_peak)]
    ratios = rng.uniform(0.25, 0.5, size=n_minor)
    if ratios.sum() > 0.55:  # keep the dominant lobe clearly globally optimal
        ratios *= 0.55 / ratios.sum()
    for ratio in ratios:
        az = (main_az + 180.0 + rng.uniform(-30.0, 30.0)) % 360.0
        width = float(rng.uniform(10.0, 16.0))
        # peak set from an integrated-flux ratio (flux ~ peak * width^2);
        # centers sit at or below the horizon (ground/facade reflections),
        # far enough from the dominant lobe that it is fully cosine-clipped
        # there, which is what produces a genuine second maximum
        peak = float(ratio) * main_peak * (main_width / width) ** 2
        lobes.append(
            Lobe(
                zenith_deg=float(rng.uniform(92.0, 110.0)),
                azimuth_deg=az,
                width_deg=width,
                peak=peak,
            )
        )
    return SceneRecipe(seed=seed, lobes=tuple(lobes), ambient=float(rng.uniform(0.0, 0.03)))


def canyon_occluders(seed: int) -> tuple[OccluderMask, OccluderMask]:
    """Two dark walls flanking a seeded street direction (an urban canyon).

    Wall tops sit 25-55 degrees above the horizon; wall radiance is a few
    percent of the sky it replaces.
    """
    rng = np.random.default_rng(seed)
    street_az = float(rng.uniform(0.0, 360.0))
    half_width = float(rng.uniform(40.0, 70.0))
    top_elevation = float(rng.uniform(25.0, 55.0))
    factor = float(rng.uniform(0.02, 0.08))
    walls = []
    for side in (90.0, 270.0):
        center = (street_az + side) % 360.0
        walls.append(
            OccluderMask(
                theta_min_deg=90.0 - top_elevation,
                theta_max_deg=90.0,
                phi_min_deg=center - half_width,
                phi_max_deg=center + half_width,
                factor=factor,
            )
        )
    return tuple(walls)


def mixed_corpus(count: int, seed: int, grid: SphereGrid) -> list[RadianceMap]:
    """Alternating unimodal/multimodal scenes for strategy benchmarks."""
    maps = []
    for i in range(count):
        recipe = multimodal_recipe(seed + i) if i % 2 == 0 else unimodal_recipe(seed + i)
        maps.append(synth_scene(recipe, grid))
    return maps
