"""Tilted-detector sensing and 1D scale-space analysis.

Four detectors tilted by +/-dtheta about the panel's two tangent axes
measure the irradiance at four nearby orientations; the per-axis finite
differences (the photodifferential) equal the derivative of the
irradiance function blurred by a box filter of half-width dtheta.  The
1D machinery here verifies that equivalence, the impulse-pair frequency
response, and the mode-elimination behavior of the box blur.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .environment import RadianceMap
from .irradiance import total_irradiance_normals
from .sphere import Orientation, rotate_toward

# ---------------------------------------------------------------------------
# 2D sensor model


@dataclass(frozen=True)
class DetectorRig:
    """Four detector orientations derived from a panel orientation.

    Detectors may dip below the horizon, so the hemisphere clamp is
    disabled on their orientations.
    """

    panel: Orientation
    tilt_deg: float

    def __post_init__(self):
        if not (0.0 < self.tilt_deg <= 90.0):
            raise ValueError("tilt angle must be in (0, 90] degrees")

    def orientations(self) -> dict[str, Orientation]:
        free = Orientation(
            u=self.panel.u, v=self.panel.v, normal=self.panel.normal, upper_hemisphere=False
        )
        return {
            "u+": rotate_toward(free, "u", +self.tilt_deg),
            "u-": rotate_toward(free, "u", -self.tilt_deg),
            "v+": rotate_toward(free, "v", +self.tilt_deg),
            "v-": rotate_toward(free, "v", -self.tilt_deg),
        }


@dataclass(frozen=True)
class PhotodiffReading:
    """Per-axis finite differences and the raw four detector irradiances."""

    e_d_u: float  # W/m^2 per radian
    e_d_v: float
    raw: dict[str, float]

    @property
    def mean_raw(self) -> float:
        return sum(self.raw.values()) / 4.0


def read_photodifferential(
    rmap: RadianceMap, panel: Orientation, tilt_deg: float
) -> PhotodiffReading:
    """Evaluate the four detectors and form the two per-axis differences."""
    rig = DetectorRig(panel, tilt_deg)
    dets = rig.orientations()
    keys = list(dets)
    normals = np.stack([dets[k].normal for k in keys])
    vals = total_irradiance_normals(rmap, normals)
    raw = dict(zip(keys, (float(v) for v in vals)))
    span = 2.0 * np.deg2rad(tilt_deg)
    return PhotodiffReading(
        e_d_u=(raw["u+"] - raw["u-"]) / span,
        e_d_v=(raw["v+"] - raw["v-"]) / span,
        raw=raw,
    )


# ---------------------------------------------------------------------------
# 1D scale-space profiles

# Scale chosen so a uniform radiance L0 yields the hemispherical result
# pi * L0, matching the 2D quadrature.
_KERNEL_SCALE = np.pi / 2.0


def _theta_grid(samples: int) -> np.ndarray:
    """Uniform periodic grid over [-180, 180) degrees."""
    return -180.0 + 360.0 * np.arange(samples) / samples


def clipped_cosine(theta_deg: np.ndarray) -> np.ndarray:
    return np.maximum(np.cos(np.deg2rad(theta_deg)), 0.0)


def _circular_convolve(values: np.ndarray, kernel_centered: np.ndarray) -> np.ndarray:
    """Circular convolution with a kernel sampled symmetrically about index 0."""
    return np.fft.irfft(np.fft.rfft(values) * np.fft.rfft(kernel_centered), n=len(values))


def _box_halfwidth_samples(tilt_deg: float, samples: int) -> int:
    return int(round(tilt_deg / (360.0 / samples)))


@dataclass(eq=False)
class ScaleSpaceProfile1D:
    """1D radiance L(theta) with its irradiance and blurred irradiance.

    theta_deg is a uniform periodic grid on [-180, 180).  irradiance is
    L convolved with the clipped-cosine kernel; blurred is additionally
    convolved with the normalized box of half-width tilt_deg.
    """

    theta_deg: np.ndarray
    radiance: np.ndarray
    tilt_deg: float
    irradiance: np.ndarray | None = None
    blurred: np.ndarray | None = None


def make_profile(radiance: np.ndarray, tilt_deg: float) -> ScaleSpaceProfile1D:
    if len(radiance) < 720:
        raise ValueError("profiles need >= 720 samples")
    return ScaleSpaceProfile1D(
        theta_deg=_theta_grid(len(radiance)),
        radiance=np.asarray(radiance, dtype=float),
        tilt_deg=tilt_deg,
    )


def blur_profile(profile: ScaleSpaceProfile1D) -> ScaleSpaceProfile1D:
    """Populate irradiance (L * k) and blurred irradiance (L * k * b)."""
    n = len(profile.radiance)
    dtheta = 2.0 * np.pi / n
    # kernel sampled at FFT-ordered angles so the convolution is centered
    idx = np.arange(n)
    angles = np.where(idx <= n // 2, idx, idx - n) * (360.0 / n)
    k = clipped_cosine(angles) * dtheta * _KERNEL_SCALE
    e_t = _circular_convolve(profile.radiance, k)
    m = _box_halfwidth_samples(profile.tilt_deg, n)
    box = np.zeros(n)
    offsets = np.arange(-m, m + 1) % n
    box[offsets] = 1.0 / (2 * m + 1)
    e_b = _circular_convolve(e_t, box)
    return ScaleSpaceProfile1D(
        theta_deg=profile.theta_deg,
        radiance=profile.radiance,
        tilt_deg=profile.tilt_deg,
        irradiance=e_t,
        blurred=e_b,
    )


def photodifferential_1d(profile: ScaleSpaceProfile1D) -> np.ndarray:
    """Finite difference of the irradiance with step tilt_deg, per radian."""
    if profile.irradiance is None:
        raise ValueError("profile irradiance not populated; call blur_profile first")
    n = len(profile.irradiance)
    m = _box_halfwidth_samples(profile.tilt_deg, n)
    step_rad = m * 2.0 * np.pi / n
    return (np.roll(profile.irradiance, -m) - np.roll(profile.irradiance, m)) / (2.0 * step_rad)


def photodiff_equals_blurred_derivative(profile: ScaleSpaceProfile1D) -> float:
    """Max |direct finite difference - d/dtheta of the blurred irradiance|.

    Shrinks toward zero as the grid is refined; the direct finite
    difference and the central-difference derivative of the blurred
    function are discretizations of the same operator.
    """
    if profile.blurred is None:
        profile = blur_profile(profile)
    n = len(profile.blurred)
    h = 2.0 * np.pi / n
    deriv = (np.roll(profile.blurred, -1) - np.roll(profile.blurred, 1)) / (2.0 * h)
    return float(np.max(np.abs(photodifferential_1d(profile) - deriv)))


# ---------------------------------------------------------------------------
# Frequency-domain analysis


def impulse_pair_response(tilt_rad: float, omega) -> np.ndarray:
    """Frequency response j*omega*sinc(omega*tilt) of the finite-difference pair.

    omega is in harmonics per full turn (integer bins of the circle);
    the response is 0 at omega = 0.
    """
    if tilt_rad <= 0.0:
        raise ValueError("tilt must be > 0")
    w = np.asarray(omega, dtype=float)
    out = np.where(w == 0.0, 0.0, 1j * w * np.sinc(w * tilt_rad / np.pi))
    return out if out.ndim else complex(out)


def sampled_impulse_pair_spectrum(tilt_deg: float, samples: int) -> tuple[np.ndarray, float]:
    """DFT of the discretely sampled impulse pair, and the quantized tilt (rad).

    The two impulses land on the nearest grid samples; the returned tilt is
    the grid-quantized value actually realized.
    """
    m = _box_halfwidth_samples(tilt_deg, samples)
    if m == 0:
        raise ValueError("tilt quantizes to zero samples at this resolution")
    tilt_q = m * 2.0 * np.pi / samples
    h = np.zeros(samples)
    h[(-m) % samples] = +1.0 / (2.0 * tilt_q)  # impulse at theta = -tilt
    h[m] = -1.0 / (2.0 * tilt_q)  # impulse at theta = +tilt
    return np.fft.fft(h), tilt_q


def kernel_spectrum(omega) -> np.ndarray:
    """|Fourier transform| of the clipped cosine, 2*cos(pi*w/2)/(1-w^2).

    Continuous at w = 1 (value pi/2); the first zero crossing sits at
    w = 3 harmonics.
    """
    w = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 2.0 * np.cos(np.pi * w / 2.0) / (1.0 - w * w)
    vals = np.where(np.isclose(np.abs(w), 1.0), np.pi / 2.0, vals)
    return np.abs(vals)


def box_spectrum(tilt_rad: float, omega) -> np.ndarray:
    """sinc frequency response of the normalized box of half-width tilt."""
    w = np.asarray(omega, dtype=float)
    return np.sinc(w * tilt_rad / np.pi)


def kernel_first_zero_crossing(samples: int = 4096) -> int:
    """Locate the kernel spectrum's first zero numerically from a sampled DFT."""
    k = clipped_cosine(_theta_grid(samples))
    spec = np.abs(np.fft.rfft(np.fft.ifftshift(k))) * (2.0 * np.pi / samples)
    floor = 1e-6 * spec[0]
    for w in range(1, samples // 2):
        if spec[w] < floor:
            return w
    raise RuntimeError("no zero crossing found")


def gaussian_fit_error(tilt_deg: float, band: float = 3.0) -> float:
    """Max abs error of a least-squares Gaussian fit to the box spectrum.

    Fit is over |omega| <= band (the kernel's passband); measures how
    closely the box blur behaves like Gaussian scale-space smoothing there.
    """
    tilt = np.deg2rad(tilt_deg)
    w = np.linspace(-band, band, 601)
    target = box_spectrum(tilt, w)
    # fit exp(-a w^2) by least squares on a
    from scipy.optimize import minimize_scalar

    def cost(a):
        return float(np.sum((np.exp(-a * w * w) - target) ** 2))

    res = minimize_scalar(cost, bounds=(1e-6, 10.0), method="bounded")
    return float(np.max(np.abs(np.exp(-res.x * w * w) - target)))


# ---------------------------------------------------------------------------
# Mode counting


def mode_positions_1d(
    values: np.ndarray, merge_deg: float = 5.0, ripple_frac: float = 0.001
) -> list[int]:
    """Sample indices of strict local maxima on the circle, merged within merge_deg.

    Maxima whose prominence is below ripple_frac of the function's range
    are ignored; for a constant function the global argmax stands in for
    the merged plateau.
    """
    f = np.asarray(values, dtype=float)
    n = len(f)
    if n < 8:
        raise ValueError("need >= 8 samples")
    rng = float(np.max(f) - np.min(f))
    if rng <= 1e-12 * max(abs(float(np.max(f))), 1.0):
        return [int(np.argmax(f))]
    tiled = np.concatenate([f, f, f])
    peaks, _ = signal.find_peaks(tiled, prominence=ripple_frac * rng)
    peaks = peaks[(peaks >= n) & (peaks < 2 * n)] - n
    if len(peaks) == 0:
        return [int(np.argmax(f))]
    step = 360.0 / n
    merge_samples = merge_deg / step
    order = sorted(peaks, key=lambda p: -f[p])
    kept: list[int] = []
    for p in order:
        dists = [min(abs(p - q), n - abs(p - q)) for q in kept]
        if all(d >= merge_samples for d in dists):
            kept.append(int(p))
    return kept


def count_modes_1d(values: np.ndarray, merge_deg: float = 5.0, ripple_frac: float = 0.001) -> int:
    """Number of merged strict local maxima on the circle."""
    return len(mode_positions_1d(values, merge_deg, ripple_frac))


def new_mode_count(
    profile: ScaleSpaceProfile1D, merge_deg: float = 5.0, ripple_frac: float = 0.001
) -> int:
    """Number of blurred-irradiance modes with no nearby irradiance mode.

    A blurred mode counts as new when no mode of the unblurred irradiance
    lies within tilt_deg + merge_deg of it: a box blur of half-width
    tilt_deg can shift a maximum by at most about that half-width, so
    anything farther is a maximum the blur created rather than moved.
    """
    if profile.blurred is None:
        profile = blur_profile(profile)
    n = len(profile.radiance)
    step = 360.0 / n
    radius = (profile.tilt_deg + merge_deg) / step
    base = mode_positions_1d(profile.irradiance, merge_deg, ripple_frac)
    blurred = mode_positions_1d(profile.blurred, merge_deg, ripple_frac)
    new = 0
    for p in blurred:
        dists = [min(abs(p - q), n - abs(p - q)) for q in base]
        if all(d > radius for d in dists):
            new += 1
    return new


# ---------------------------------------------------------------------------
# Seeded 1D corpus and CSV export


def profile_corpus_radiance(seed: int, samples: int = 1440) -> np.ndarray:
    """Seeded multimodal 1D radiance: ambient plus 3-6 positive bumps."""
    rng = np.random.default_rng(seed)
    theta = _theta_grid(samples)
    values = np.full(samples, float(rng.uniform(0.0, 0.1)))
    for _ in range(int(rng.integers(3, 7))):
        center = rng.uniform(-180.0, 180.0)
        width = rng.uniform(8.0, 35.0)
        peak = rng.uniform(0.5, 5.0)
        delta = (theta - center + 180.0) % 360.0 - 180.0
        values += peak * np.exp(-((delta / width) ** 2))
    return values


def export_profile_csv(profile: ScaleSpaceProfile1D, path, header_comment: str | None = None) -> None:
    """theta_deg,L,E_T,E_B,E_D rows for plotting scale-space panels."""
    if profile.blurred is None:
        profile = blur_profile(profile)
    e_d = photodifferential_1d(profile)
    with open(path, "w", newline="") as f:
        if header_comment:
            f.write(f"# {header_comment}\n")
        writer = csv.writer(f)
        writer.writerow(["theta_deg", "L", "E_T", "E_B", "E_D"])
        for i, th in enumerate(profile.theta_deg):
            writer.writerow(
                [
                    f"{th:.6g}",
                    f"{profile.radiance[i]:.9g}",
                    f"{profile.irradiance[i]:.9g}",
                    f"{profile.blurred[i]:.9g}",
                    f"{e_d[i]:.9g}",
                ]
            )
