"""Gabor filter bank, response computation, and feature normalization.

Each filter is a Gaussian-windowed complex sinusoid sampled on the integer
grid [-r, r] x [-r, r]:

    real(x, y) = exp(-(xr^2 + gamma^2 * yr^2) / (2 sigma^2)) * cos(2 pi f xr)
    imag(x, y) = exp(-(xr^2 + gamma^2 * yr^2) / (2 sigma^2)) * sin(2 pi f xr)

with rotated coordinates xr = x cos(theta) + y sin(theta) and
yr = -x sin(theta) + y cos(theta); y grows downward (image row direction).
The real kernel is DC-corrected (mean subtracted) and both kernels are then
L2-normalized, so responses ignore constant intensity. A pixel's feature is
the quadrature magnitude sqrt(re^2 + im^2) of the correlation of the image
(real values 0-255, replicate borders) with the two kernels.

The default bank is 3 frequencies x 3 orientations = 9 filters ordered
frequency-major, orientation-minor; per-filter envelope sigma = 0.56 / f and
kernel radius ceil(3 sigma) unless overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, InvalidConfig

DEFAULT_FREQUENCIES = (0.1, 0.2, 0.4)
DEFAULT_ORIENTATIONS_DEG = (0.0, 60.0, 120.0)
FEATURE_DIM = 9


@dataclass
class GaborConfig:
    frequencies: tuple[float, ...] = DEFAULT_FREQUENCIES
    orientations_deg: tuple[float, ...] = DEFAULT_ORIENTATIONS_DEG
    gamma_aspect: float = 0.5
    sigma_envelope: float | None = None  # None: per-filter 0.56 / frequency
    kernel_radius: int | None = None  # None: per-filter ceil(3 sigma)

    def validate(self) -> None:
        if len(self.frequencies) * len(self.orientations_deg) != FEATURE_DIM:
            raise InvalidConfig(
                "filter bank must have exactly "
                f"{FEATURE_DIM} filters, got "
                f"{len(self.frequencies)}x{len(self.orientations_deg)}"
            )
        for f in self.frequencies:
            if not 0.0 < f <= 0.5:
                raise InvalidConfig(f"frequency must be in (0, 0.5], got {f}")
        if self.gamma_aspect <= 0:
            raise InvalidConfig(f"gamma_aspect must be > 0, got {self.gamma_aspect}")
        if self.sigma_envelope is not None and self.sigma_envelope <= 0:
            raise InvalidConfig(f"sigma_envelope must be > 0, got {self.sigma_envelope}")
        if self.kernel_radius is not None:
            if self.sigma_envelope is None:
                sigma_max = max(0.56 / f for f in self.frequencies)
            else:
                sigma_max = self.sigma_envelope
            if self.kernel_radius < math.ceil(3 * sigma_max):
                raise InvalidConfig(
                    f"kernel_radius {self.kernel_radius} < ceil(3 sigma) "
                    f"= {math.ceil(3 * sigma_max)}"
                )

    def to_dict(self) -> dict:
        return {
            "frequencies": list(self.frequencies),
            "orientations_deg": list(self.orientations_deg),
            "gamma_aspect": self.gamma_aspect,
            "sigma_envelope": self.sigma_envelope,
            "kernel_radius": self.kernel_radius,
        }

    @staticmethod
    def from_dict(doc: dict) -> "GaborConfig":
        cfg = GaborConfig(
            frequencies=tuple(doc["frequencies"]),
            orientations_deg=tuple(doc["orientations_deg"]),
            gamma_aspect=doc["gamma_aspect"],
            sigma_envelope=doc["sigma_envelope"],
            kernel_radius=doc["kernel_radius"],
        )
        cfg.validate()
        return cfg


@dataclass
class GaborFilter:
    frequency: float
    orientation_rad: float
    sigma: float
    radius: int
    real: np.ndarray = field(repr=False)
    imag: np.ndarray = field(repr=False)


def _make_filter(frequency: float, orientation_rad: float, sigma: float,
                 radius: int, gamma: float) -> GaborFilter:
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    y, x = np.meshgrid(coords, coords, indexing="ij")
    xr = x * math.cos(orientation_rad) + y * math.sin(orientation_rad)
    yr = -x * math.sin(orientation_rad) + y * math.cos(orientation_rad)
    envelope = np.exp(-(xr**2 + (gamma * yr) ** 2) / (2.0 * sigma**2))
    phase = 2.0 * math.pi * frequency * xr
    real = envelope * np.cos(phase)
    imag = envelope * np.sin(phase)
    real = real - real.mean()  # DC correction: zero response to constants
    real /= np.sqrt((real**2).sum())
    imag /= np.sqrt((imag**2).sum())
    return GaborFilter(frequency, orientation_rad, sigma, radius, real, imag)


def build_filter_bank(config: GaborConfig | None = None) -> list[GaborFilter]:
    """Build the filter list, frequency-major then orientation order."""
    config = config or GaborConfig()
    config.validate()
    bank = []
    for f in config.frequencies:
        sigma = config.sigma_envelope if config.sigma_envelope is not None else 0.56 / f
        radius = (
            config.kernel_radius
            if config.kernel_radius is not None
            else math.ceil(3 * sigma)
        )
        for theta_deg in config.orientations_deg:
            bank.append(
                _make_filter(f, math.radians(theta_deg), sigma, radius,
                             config.gamma_aspect)
            )
    return bank


def convolve_response(image: np.ndarray, filt: GaborFilter) -> np.ndarray:
    """Quadrature magnitude of the image's correlation with one filter.

    The image is treated as real values 0-255 with replicate (clamp-to-edge)
    borders; output is float64 with the image's shape.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise DimensionMismatch(f"image must be 2-D, got shape {img.shape}")
    re = ndimage.correlate(img, filt.real, mode="nearest")
    im = ndimage.correlate(img, filt.imag, mode="nearest")
    return np.hypot(re, im)


def extract_features(image: np.ndarray, bank: list[GaborFilter]) -> np.ndarray:
    """Per-pixel feature grid (h, w, 9) over the 9-filter bank."""
    if len(bank) != FEATURE_DIM:
        raise DimensionMismatch(f"expected {FEATURE_DIM} filters, got {len(bank)}")
    responses = [convolve_response(image, filt) for filt in bank]
    return np.stack(responses, axis=-1)


class FeatureScaler:
    """Z-score normalization fitted on training rows only.

    Population statistics (ddof 0); standard deviations are floored at 1e-12
    before division so constant dimensions normalize to exactly zero on the
    data they were fitted on.
    """

    _FLOOR = 1e-12

    def __init__(self):
        self.mean_ = None
        self.scale_ = None

    def fit(self, rows: np.ndarray) -> "FeatureScaler":
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise DimensionMismatch(f"expected (n, d) rows, got shape {rows.shape}")
        self.mean_ = rows.mean(axis=0)
        self.scale_ = np.maximum(rows.std(axis=0), self._FLOOR)
        return self

    def transform(self, data: np.ndarray) -> np.ndarray:
        """Normalize (n, d) rows or an (h, w, d) grid."""
        if self.mean_ is None:
            raise InvalidConfig("FeatureScaler used before fit")
        data = np.asarray(data, dtype=np.float64)
        if data.shape[-1] != self.mean_.shape[0]:
            raise DimensionMismatch(
                f"feature width {data.shape[-1]} != fitted width {self.mean_.shape[0]}"
            )
        return (data - self.mean_) / self.scale_

    def to_dict(self) -> dict:
        return {"mean": self.mean_.tolist(), "scale": self.scale_.tolist()}

    @staticmethod
    def from_dict(doc: dict) -> "FeatureScaler":
        scaler = FeatureScaler()
        scaler.mean_ = np.asarray(doc["mean"], dtype=np.float64)
        scaler.scale_ = np.asarray(doc["scale"], dtype=np.float64)
        if scaler.mean_.shape != scaler.scale_.shape or scaler.mean_.ndim != 1:
            raise InvalidConfig("scaler mean/scale shape mismatch")
        if np.any(scaler.scale_ < FeatureScaler._FLOOR):
            raise InvalidConfig("scaler scale below floor")
        return scaler
