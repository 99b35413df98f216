"""
Seeded synthetic plume scenes with ground-truth labels.

The plume is an anisotropic Gaussian ridge whose axis may bend
quadratically. With ``s_u`` and ``s_v`` chosen so the label threshold
(a fraction of the peak) lands exactly on the ellipse with full axes
``length`` x ``thickness``, the label of a straight plume is that ellipse.

Bands are composed over a smooth, seeded land-cover background
(vegetation, soil, water, and a few bright clouds). The plume is bright in
blue, slightly less in red and green, and dark in NIR, so a classifier has
to use the NIR contrast to separate plume from cloud.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from plumedt.errors import PlumeInputError
from plumedt.raster import U16_MAX, Scene

DEFAULT_DIMS = (256, 256)
LABEL_FRACTION = 0.25

# Plume reflectance per band relative to the plume's blue brightness.
PLUME_SPECTRUM = np.array([0.9, 0.8, 1.0, 0.3])

# (red, green, blue, nir) reflectance of each background land cover.
_COVER_SPECTRA = np.array(
    [
        [0.06, 0.10, 0.05, 0.55],  # vegetation
        [0.30, 0.24, 0.16, 0.34],  # bare soil / lava field
        [0.04, 0.06, 0.08, 0.03],  # water
        [0.44, 0.40, 0.36, 0.30],  # ash deposit / pale sand
    ]
)
_CLOUD_SPECTRUM = np.array([0.80, 0.82, 0.85, 0.78])


@dataclass(frozen=True)
class PlumeParams:
    """Geometry and radiometry of one synthetic plume.

    ``curvature`` displaces the ridge normal to its axis by
    ``curvature * u**2 / (length / 2)`` at axial offset ``u``, so the tips
    bend by ``curvature * length / 2`` pixels.
    """

    centroid: tuple[float, float]
    axis_angle: float
    length: float
    thickness: float
    curvature: float = 0.0
    peak_intensity: float = 0.8
    noise_sigma: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if not self.length > self.thickness > 0:
            raise PlumeInputError(
                f"need length > thickness > 0, got {self.length}, {self.thickness}"
            )
        if not 0 < self.peak_intensity <= 1:
            raise PlumeInputError(f"peak_intensity must be in (0, 1], got {self.peak_intensity}")
        if self.noise_sigma < 0:
            raise PlumeInputError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    @property
    def sigmas(self) -> tuple[float, float]:
        """Gaussian scales along and across the axis."""
        k = math.sqrt(2.0 * math.log(1.0 / LABEL_FRACTION))
        return self.length / 2.0 / k, self.thickness / 2.0 / k


def _axis_coords(shape, params: PlumeParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel (along, across) coordinates relative to the bent axis."""
    h, w = shape
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    cx, cy = params.centroid
    c, s = math.cos(params.axis_angle), math.sin(params.axis_angle)
    u = (x - cx) * c + (y - cy) * s
    v = -(x - cx) * s + (y - cy) * c
    v = v - params.curvature * u**2 / (params.length / 2.0)
    return u, v


def ridge(shape, params: PlumeParams) -> np.ndarray:
    """Noiseless plume intensity, peaking at ``params.peak_intensity``."""
    u, v = _axis_coords(shape, params)
    su, sv = params.sigmas
    return params.peak_intensity * np.exp(-0.5 * ((u / su) ** 2 + (v / sv) ** 2))


def _footprint_points(params: PlumeParams, n: int = 721) -> np.ndarray:
    """Points on the label boundary of the (possibly bent) plume."""
    t = np.linspace(0.0, 2.0 * math.pi, n)
    u = params.length / 2.0 * np.cos(t)
    v = params.thickness / 2.0 * np.sin(t) + params.curvature * u**2 / (params.length / 2.0)
    c, s = math.cos(params.axis_angle), math.sin(params.axis_angle)
    cx, cy = params.centroid
    return np.column_stack([cx + u * c - v * s, cy + u * s + v * c])


def footprint_fits(width: int, height: int, params: PlumeParams, margin: float = 1.0) -> bool:
    pts = _footprint_points(params)
    return bool(
        pts[:, 0].min() >= margin
        and pts[:, 1].min() >= margin
        and pts[:, 0].max() <= width - 1 - margin
        and pts[:, 1].max() <= height - 1 - margin
    )


def _background(shape, rng: np.random.Generator) -> np.ndarray:
    """Smooth land-cover mixture, shape (4, h, w), values in [0, 1]."""
    h, w = shape
    scale = max(h, w) / 10.0
    logits = np.stack(
        [ndimage.gaussian_filter(rng.standard_normal(shape), scale, mode="wrap") for _ in range(len(_COVER_SPECTRA))]
    )
    logits /= logits.std(axis=(1, 2), keepdims=True) + 1e-12
    weights = np.exp(2.5 * logits)
    weights /= weights.sum(axis=0, keepdims=True)
    bg = np.einsum("khw,kb->bhw", weights, _COVER_SPECTRA)

    texture = ndimage.gaussian_filter(rng.standard_normal((4, h, w)), (0, 1.5, 1.5))
    texture /= texture.std() + 1e-12
    bg = bg * (1.0 + 0.08 * texture)

    cloud = np.zeros(shape)
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(rng.integers(0, 4)):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        r = rng.uniform(0.03, 0.08) * max(h, w)
        cloud = np.maximum(cloud, np.exp(-0.5 * ((yy - cy) ** 2 + (xx - cx) ** 2) / r**2))
    bg = bg * (1.0 - cloud) + _CLOUD_SPECTRUM[:, None, None] * cloud
    return np.clip(bg, 0.0, 1.0)


def generate_scene(
    width: int,
    height: int,
    params: PlumeParams,
    *,
    scene_id: str = "synthetic",
    label_fraction: float = LABEL_FRACTION,
    gsd: float = 0.5,
) -> Scene:
    """Render one labeled scene.

    The noisy plume intensity ``I`` (ridge plus seeded Gaussian noise,
    clamped to [0, 1]) acts as an opacity over the background:
    ``band = background * (1 - I) + spectrum * I``. The label is the
    noiseless ridge above ``label_fraction * peak_intensity``.
    """
    if width < 1 or height < 1:
        raise PlumeInputError("scene dimensions must be positive")
    if not footprint_fits(width, height, params):
        raise PlumeInputError("plume footprint does not fit inside the frame")
    shape = (height, width)
    rng = np.random.default_rng(params.seed)
    clean = ridge(shape, params)
    intensity = np.clip(clean + params.noise_sigma * rng.standard_normal(shape), 0.0, 1.0)
    bg = _background(shape, rng)
    bands = bg * (1.0 - intensity) + PLUME_SPECTRUM[:, None, None] * intensity
    raw = np.rint(np.clip(bands, 0.0, 1.0) * U16_MAX).astype(np.uint16)
    label = clean > label_fraction * params.peak_intensity
    return Scene(scene_id, raw, label, gsd)


def random_params(
    rng: np.random.Generator,
    width: int,
    height: int,
    coverage: tuple[float, float] = (0.05, 0.11),
) -> PlumeParams:
    """Draw plume parameters whose ellipse covers a target frame fraction.

    The centroid is drawn uniformly over the frame and then clamped so the
    footprint fits; plain uniform placement inside the feasible box would
    crowd large plumes around the frame center.
    """
    area = width * height
    for _ in range(1000):
        target = rng.uniform(*coverage)
        aspect = rng.uniform(2.5, 6.0)
        angle = rng.uniform(0.0, math.pi)
        curvature = rng.uniform(-0.25, 0.25)
        # ellipse area pi * L * T / 4 = target * area
        thickness = math.sqrt(4.0 * target * area / (math.pi * aspect))
        length = aspect * thickness
        probe = PlumeParams((0.0, 0.0), angle, length, thickness, curvature)
        pts = _footprint_points(probe)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span_x = (2.0 - lo[0], width - 3.0 - hi[0])
        span_y = (2.0 - lo[1], height - 3.0 - hi[1])
        if span_x[0] > span_x[1] or span_y[0] > span_y[1]:
            continue
        cx = float(np.clip(rng.uniform(0.0, width), *span_x))
        cy = float(np.clip(rng.uniform(0.0, height), *span_y))
        return PlumeParams(
            centroid=(cx, cy),
            axis_angle=angle,
            length=length,
            thickness=thickness,
            curvature=curvature,
            peak_intensity=rng.uniform(0.55, 0.95),
            noise_sigma=rng.uniform(0.02, 0.06),
            seed=int(rng.integers(0, 2**63 - 1)),
        )
    raise PlumeInputError(f"cannot place a plume in a {width}x{height} frame")


def generate_dataset(n: int, base_seed: int = 0, dims: tuple[int, int] = DEFAULT_DIMS) -> list[Scene]:
    """Generate `n` labeled scenes; identical output for identical arguments."""
    if n < 1:
        raise PlumeInputError(f"need at least one scene, got n={n}")
    width, height = dims
    rng = np.random.default_rng(base_seed)
    scenes = []
    for i in range(n):
        params = random_params(rng, width, height)
        scenes.append(generate_scene(width, height, params, scene_id=f"synth-{base_seed}-{i:03d}"))
    return scenes
