"""Pseudo-colour export of hypercubes."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_cube


@dataclass(frozen=True)
class RgbProjection:
    """``matrix`` (3 x C) maps a spectrum to linear RGB; ``gamma`` encodes it."""

    matrix: np.ndarray
    gamma: float = 1 / 2.2

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != 3:
            raise ValueError(f"projection must be 3 x C, got {m.shape}")
        if np.any(m < 0):
            raise ValueError("projection weights must be non-negative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "matrix", m)


def default_projection(band_centers=None, n_bands=16, sigma=40.0):
    """Gaussian R/G/B weights at 610/540/470 nm, each row summing to one."""
    if band_centers is None:
        band_centers = np.linspace(460.0, 630.0, n_bands)
    centers = np.asarray(band_centers, dtype=float)
    peaks = np.array([610.0, 540.0, 470.0])
    m = np.exp(-0.5 * ((centers[None, :] - peaks[:, None]) / sigma) ** 2)
    return RgbProjection(m / m.sum(axis=1, keepdims=True))


def to_rgb(cube, proj):
    """Project to gamma-encoded 8-bit RGB, shape ``(height, width, 3)``."""
    cube = check_cube(cube)
    if proj.matrix.shape[1] != cube.shape[2]:
        raise ValueError(f"projection expects {proj.matrix.shape[1]} bands, cube has {cube.shape[2]}")
    linear = np.clip(cube @ proj.matrix.T, 0.0, 1.0)
    return np.round(255.0 * linear ** proj.gamma).astype(np.uint8)


def write_rgb(cube, proj, path):
    """Write the projection as PNG (or binary PPM when the suffix is ``.ppm``)."""
    rgb = to_rgb(cube, proj)
    path = Path(path)
    if path.suffix.lower() == ".ppm":
        h, w, _ = rgb.shape
        path.write_bytes(f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes())
        return rgb
    try:
        from PIL import Image
    except ImportError:  # pragma: no cover - Pillow is a declared dependency
        return write_rgb(cube, proj, path.with_suffix(".ppm"))
    Image.fromarray(rgb).save(path)
    return rgb
