"""Multispectral filter array model: the band-selection operator, the
snapshot-override projection and the bilinear demosaicking baseline.

Arrays follow the numpy image convention: a hypercube is indexed
``cube[y, x, c]`` with shape ``(height, width, bands)`` and a snapshot
mosaic is indexed ``snapshot[y, x]``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_cube, check_snapshot


@dataclass(frozen=True)
class MsfaPattern:
    """An ``n x n`` periodic filter array.

    ``band_of[j, i]`` is the band measured at every pixel with
    ``y % n == j`` and ``x % n == i``.
    """

    band_of: np.ndarray
    n_bands: int = field(default=None)

    def __post_init__(self):
        band_of = np.asarray(self.band_of)
        if band_of.ndim != 2 or band_of.shape[0] != band_of.shape[1] or band_of.shape[0] < 1:
            raise ValueError(f"band_of must be a non-empty square grid, got shape {band_of.shape}")
        if not np.issubdtype(band_of.dtype, np.integer):
            if not np.all(band_of == np.round(band_of)):
                raise ValueError("band_of must contain integer band indices")
        band_of = band_of.astype(np.intp)
        n_bands = int(band_of.max()) + 1 if self.n_bands is None else int(self.n_bands)
        if band_of.min() < 0 or band_of.max() >= n_bands:
            raise ValueError(f"band indices must lie in [0, {n_bands}), got "
                             f"[{band_of.min()}, {band_of.max()}]")
        band_of.setflags(write=False)
        object.__setattr__(self, "band_of", band_of)
        object.__setattr__(self, "n_bands", n_bands)

    @property
    def n(self):
        return self.band_of.shape[0]

    @classmethod
    def default(cls, n=4):
        """Row-major layout ``band_of[j, i] = n*j + i`` with ``n**2`` bands."""
        return cls(np.arange(n * n).reshape(n, n), n_bands=n * n)

    def band_map(self, height, width):
        """Band index measured at each pixel, shape ``(height, width)``."""
        ys = np.arange(height) % self.n
        xs = np.arange(width) % self.n
        return self.band_of[ys[:, None], xs[None, :]]

    def sample_mask(self, height, width):
        """Boolean ``(height, width, n_bands)`` mask of measured voxels."""
        bands = self.band_map(height, width)
        return bands[:, :, None] == np.arange(self.n_bands)[None, None, :]

    def __eq__(self, other):
        if not isinstance(other, MsfaPattern):
            return NotImplemented
        return self.n_bands == other.n_bands and np.array_equal(self.band_of, other.band_of)

    def __hash__(self):
        return hash((self.n_bands, self.band_of.tobytes()))


def load_pattern(path):
    """Read a pattern file: ``"n C"`` then ``n`` rows of ``n`` band indices."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError(f"{path}: first line must be 'n C'")
    n, n_bands = (int(v) for v in lines[0])
    rows = lines[1:]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {n} band indices")
    return MsfaPattern(np.array([[int(v) for v in r] for r in rows]), n_bands=n_bands)


def save_pattern(pattern, path):
    rows = [" ".join(str(int(b)) for b in row) for row in pattern.band_of]
    Path(path).write_text(f"{pattern.n} {pattern.n_bands}\n" + "\n".join(rows) + "\n")


def _check_pattern_fits(pattern, n_bands):
    if pattern.n_bands != n_bands:
        raise ValueError(f"pattern describes {pattern.n_bands} bands but the cube has {n_bands}")


def mosaic_apply(cube, pattern):
    """Simulate the snapshot: keep the single measured band at each pixel."""
    cube = check_cube(cube)
    if pattern.band_of.max() >= cube.shape[2]:
        raise ValueError(f"pattern references band {pattern.band_of.max()} but the cube "
                         f"has only {cube.shape[2]} bands")
    height, width, _ = cube.shape
    bands = pattern.band_map(height, width)
    return np.take_along_axis(cube, bands[:, :, None], axis=2)[:, :, 0]


def override_apply(cube, snapshot, pattern):
    """Overwrite the measured voxels of ``cube`` with the snapshot values.

    Returns a new array; ``mosaic_apply`` of the result reproduces
    ``snapshot`` exactly.
    """
    cube = check_cube(cube)
    snapshot = check_snapshot(snapshot)
    if cube.shape[:2] != snapshot.shape:
        raise ValueError(f"cube {cube.shape[:2]} and snapshot {snapshot.shape} differ spatially")
    _check_pattern_fits(pattern, cube.shape[2])
    out = cube.copy()
    height, width = snapshot.shape
    bands = pattern.band_map(height, width)
    yy, xx = np.indices((height, width))
    out[yy, xx, bands] = snapshot
    return out


def _band_lattice(pattern, band):
    """Row and column phases at which ``band`` is measured.

    Separable interpolation needs the sample positions of a band to be a
    Cartesian product of row phases and column phases.
    """
    js, is_ = np.nonzero(pattern.band_of == band)
    if js.size == 0:
        raise ValueError(f"band {band} is never measured by the pattern")
    rows, cols = np.unique(js), np.unique(is_)
    if rows.size * cols.size != js.size:
        raise ValueError(f"samples of band {band} do not form a rectangular lattice")
    return rows, cols


def _interp_axis(values, known, size, axis):
    """Linear interpolation along ``axis`` from samples at ``known``
    coordinates, clamped to the nearest sample outside their span."""
    target = np.arange(size, dtype=float)
    moved = np.moveaxis(values, axis, -1)
    out = np.empty(moved.shape[:-1] + (size,), dtype=values.dtype)
    if known.size == 1:
        out[...] = moved[..., :1]
    else:
        idx = np.clip(np.searchsorted(known, target, side="right") - 1, 0, known.size - 2)
        x0, x1 = known[idx], known[idx + 1]
        t = (target - x0) / (x1 - x0)
        lo, hi = moved[..., idx], moved[..., idx + 1]
        out[...] = lo + t * (hi - lo)
        # knots are copied, margins clamped, so measured values survive bit-for-bit
        out[..., known] = moved
        out[..., target < known[0]] = moved[..., :1]
        out[..., target > known[-1]] = moved[..., -1:]
    return np.moveaxis(out, -1, axis)


def bilinear_demosaic(snapshot, pattern):
    """Per-band separable bilinear interpolation of the measured samples."""
    snapshot = check_snapshot(snapshot)
    height, width = snapshot.shape
    n = pattern.n
    if height < n or width < n:
        raise ValueError(f"snapshot {snapshot.shape} is smaller than one {n}x{n} mosaic period")
    cube = np.empty((height, width, pattern.n_bands), dtype=np.float64)
    for band in range(pattern.n_bands):
        row_phases, col_phases = _band_lattice(pattern, band)
        ys = np.flatnonzero(np.isin(np.arange(height) % n, row_phases))
        xs = np.flatnonzero(np.isin(np.arange(width) % n, col_phases))
        samples = snapshot[np.ix_(ys, xs)].astype(np.float64)
        along_x = _interp_axis(samples, xs, width, axis=1)
        cube[:, :, band] = _interp_axis(along_x, ys, height, axis=0)
    return cube
