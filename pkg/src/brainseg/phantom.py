"""Synthetic head phantoms: nested-ellipse label maps plus Gaussian noise.

The label geometry is background around a skull ring, a CSF ring, a gray-matter
ring, and a white-matter core. The ellipses are tall and narrow: the vertical
semi-axes exceed half the image height, so the tops and bottoms are clipped off
the canvas and each ring appears as a pair of near-vertical stripes. Stripe
widths are a few pixels, chosen so every non-background tissue pixel sits close
to two boundaries at once and its oriented band-pass signature combines both
edges (deep featureless areas then occur only in the background, which keeps
all five per-tissue scores meaningful, and narrow stripes respond strongly in
the higher-frequency channels where single far edges do not). The image is
``tissue_means[label] + N(0, noise_sigma)`` rounded half-to-even and clamped
to [0, 255].

RNG stream discipline (one Xoshiro256PP seeded from ``config.seed``):
1. If ``ellipse_jitter > 0``: eight uniform draws scale the semi-axes, in the
   fixed order skull-a, skull-b, csf-a, csf-b, gray-a, gray-b, white-a, white-b,
   each multiplied by ``1 + jitter * (2u - 1)``.
2. If ``noise_sigma > 0``: one N(0, 1) draw per pixel in row-major order
   (Box-Muller pairs; for odd pixel counts the final pair's second draw is
   discarded).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .rng import Xoshiro256PP
from .tissue import Tissue

# (semi-axis x, semi-axis y) as fractions of size/2, outermost first. The y
# fractions are > 1 so the caps fall outside the canvas; the x fractions put
# 6-pixel-wide rings around a 6-pixel white core at the default size of 128.
_RING_FRACTIONS = {
    Tissue.SKULL: (0.3307, 1.35),
    Tissue.CSF: (0.2362, 1.34),
    Tissue.GRAY_MATTER: (0.1417, 1.33),
    Tissue.WHITE_MATTER: (0.0472, 1.32),
}

DEFAULT_TISSUE_MEANS = {
    Tissue.BACKGROUND: 10.0,
    Tissue.SKULL: 220.0,
    Tissue.CSF: 60.0,
    Tissue.GRAY_MATTER: 120.0,
    Tissue.WHITE_MATTER: 180.0,
}

_MIN_SIZE = 32  # smallest size at which all five tissues are guaranteed present


@dataclass
class PhantomConfig:
    size: int = 128
    noise_sigma: float = 10.0
    seed: int = 0
    tissue_means: dict[Tissue, float] = field(
        default_factory=lambda: dict(DEFAULT_TISSUE_MEANS)
    )
    ellipse_jitter: float = 0.0

    def validate(self) -> None:
        if self.size < _MIN_SIZE:
            raise InvalidConfig(f"phantom size must be >= {_MIN_SIZE}, got {self.size}")
        if self.noise_sigma < 0:
            raise InvalidConfig(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.ellipse_jitter <= 0.2:
            raise InvalidConfig(
                f"ellipse_jitter must be in [0, 0.2], got {self.ellipse_jitter}"
            )
        if set(self.tissue_means) != set(Tissue):
            raise InvalidConfig("tissue_means must cover all five tissues")
        means = [float(self.tissue_means[t]) for t in Tissue]
        if len(set(means)) != len(means):
            raise InvalidConfig("tissue means must be pairwise distinct")
        if any(not 0.0 <= m <= 255.0 for m in means):
            raise InvalidConfig("tissue means must lie in [0, 255]")


def generate_phantom(config: PhantomConfig) -> tuple[np.ndarray, np.ndarray]:
    """Return (image, labels) uint8 arrays of shape (size, size)."""
    config.validate()
    rng = Xoshiro256PP(config.seed)
    half = config.size / 2.0

    axes = {}
    for tissue, (fa, fb) in _RING_FRACTIONS.items():
        a, b = fa * half, fb * half
        if config.ellipse_jitter > 0:
            a *= 1.0 + config.ellipse_jitter * (2.0 * rng.random() - 1.0)
            b *= 1.0 + config.ellipse_jitter * (2.0 * rng.random() - 1.0)
        axes[tissue] = (a, b)
    # Keep nesting with at least a 1px gap even at maximum jitter.
    order = [Tissue.SKULL, Tissue.CSF, Tissue.GRAY_MATTER, Tissue.WHITE_MATTER]
    for outer, inner in zip(order, order[1:]):
        oa, ob = axes[outer]
        ia, ib = axes[inner]
        axes[inner] = (min(ia, oa - 1.0), min(ib, ob - 1.0))

    center = (config.size - 1) / 2.0
    yy, xx = np.indices((config.size, config.size), dtype=np.float64)
    dx, dy = xx - center, yy - center
    labels = np.full((config.size, config.size), int(Tissue.BACKGROUND), dtype=np.uint8)
    for tissue in order:  # outermost first; inner assignments overwrite
        a, b = axes[tissue]
        inside = (dx / a) ** 2 + (dy / b) ** 2 <= 1.0
        labels[inside] = int(tissue)

    means_lut = np.array([config.tissue_means[t] for t in Tissue], dtype=np.float64)
    values = means_lut[labels]
    if config.noise_sigma > 0:
        noise = np.array(rng.gaussians(labels.size), dtype=np.float64)
        values = values + config.noise_sigma * noise.reshape(labels.shape)
    # np.rint rounds half to even, matching the documented rounding rule.
    image = np.clip(np.rint(values), 0, 255).astype(np.uint8)
    return image, labels
