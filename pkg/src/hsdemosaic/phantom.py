"""Synthetic ground-truth hypercubes.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so
a phantom is a pure function of its :class:`PhantomSpec`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

KINDS = ("flat", "gradient-ramp", "edges", "blobs")


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 64
    height: int = 64
    bands: int = 16
    kind: str = "edges"
    seed: int = 0
    level: float = 0.5
    n_shapes: int = 6
    blur_sigma: float = 1.0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}; choose from {KINDS}")
        if min(self.width, self.height, self.bands) < 1:
            raise ValueError("phantom dimensions must be positive")
        if self.noise_sigma < 0 or self.blur_sigma < 0:
            raise ValueError("noise_sigma and blur_sigma must be non-negative")


def smooth_spectrum(rng, bands, lo=0.15, hi=0.85):
    """A random spectrum: a baseline plus two broad bumps over band index."""
    c = np.linspace(0.0, 1.0, bands)
    s = rng.uniform(0.2, 0.5) + 0.15 * rng.uniform(-1, 1) * c
    for _ in range(2):
        centre, width = rng.uniform(0, 1), rng.uniform(0.2, 0.5)
        s = s + rng.uniform(0.1, 0.35) * np.exp(-0.5 * ((c - centre) / width) ** 2)
    return lo + (hi - lo) * np.clip(s, 0.0, 1.0)


def _shape_mask(rng, height, width, n_shapes):
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    mask = np.zeros((height, width), dtype=bool)
    for k in range(n_shapes):
        kind = k % 3
        if kind == 0:
            cy, cx = rng.uniform(0, height), rng.uniform(0, width)
            r = rng.uniform(0.1, 0.25) * min(height, width)
            mask ^= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        elif kind == 1:
            y0, x0 = rng.integers(0, height), rng.integers(0, width)
            h = rng.integers(height // 6 + 1, height // 2 + 2)
            w = rng.integers(width // 6 + 1, width // 2 + 2)
            mask[y0:y0 + h, x0:x0 + w] ^= True
        else:
            angle = rng.uniform(0, np.pi)
            offset = rng.uniform(0.3, 0.7)
            proj = (np.cos(angle) * xx / width + np.sin(angle) * yy / height)
            mask ^= proj > offset * (abs(np.cos(angle)) + abs(np.sin(angle)))
    if mask.all() or not mask.any():
        mask[: height // 2] = ~mask[: height // 2]
    return mask


def gen_phantom(spec):
    """Render the phantom described by ``spec`` as a ``(height, width, bands)`` cube."""
    rng = np.random.default_rng(spec.seed)
    h, w, c = spec.height, spec.width, spec.bands
    yy, xx = np.mgrid[0:h, 0:w].astype(float)

    if spec.kind == "flat":
        cube = np.full((h, w, c), float(spec.level))
    elif spec.kind == "gradient-ramp":
        angle = rng.uniform(0, 2 * np.pi)
        ramp = np.cos(angle) * xx / max(w - 1, 1) + np.sin(angle) * yy / max(h - 1, 1)
        ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-12)
        cube = (0.3 + 0.7 * ramp)[:, :, None] * smooth_spectrum(rng, c)[None, None, :]
    elif spec.kind == "edges":
        # two materials separated by boundaries shared by every band; the
        # optical blur acts on the material map, so every band's gradient is
        # the same spatial field scaled by that band's contrast
        mask = _shape_mask(rng, h, w, spec.n_shapes).astype(float)
        if spec.blur_sigma > 0:
            mask = gaussian_filter(mask, spec.blur_sigma, mode="nearest")
        background = smooth_spectrum(rng, c, 0.1, 0.45)
        foreground = smooth_spectrum(rng, c, 0.55, 0.9)
        cube = background + mask[:, :, None] * (foreground - background)
    else:  # blobs
        cube = np.tile(0.5 * smooth_spectrum(rng, c, 0.1, 0.4), (h, w, 1))
        for _ in range(spec.n_shapes):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            s = rng.uniform(0.05, 0.15) * min(h, w)
            blob = np.exp(-0.5 * ((yy - cy) ** 2 + (xx - cx) ** 2) / s ** 2)
            cube = cube + 0.5 * blob[:, :, None] * smooth_spectrum(rng, c, 0.0, 1.0)[None, None, :]
        cube = np.clip(cube, 0.0, 1.0)

    if spec.noise_sigma > 0:
        cube = cube + rng.normal(0.0, spec.noise_sigma, cube.shape)
    return cube
