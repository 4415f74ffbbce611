"""Band-to-band weights from the transport distance between filter responses."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_positive

#: Distances enter the exponential weight in micrometres, so that a
#: temperature of 0.1 spans roughly a hundred nanometres of band separation.
DISTANCE_UNIT_NM = 1000.0


@dataclass(frozen=True)
class SpectralResponseSet:
    """``responses[c, k]`` is the response of band ``c`` at ``wavelengths[k]`` (nm)."""

    wavelengths: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        wl = np.asarray(self.wavelengths, dtype=float)
        resp = np.atleast_2d(np.asarray(self.responses, dtype=float))
        if wl.ndim != 1 or wl.size < 1:
            raise ValueError("wavelengths must be a non-empty 1-D grid")
        if np.any(np.diff(wl) <= 0):
            raise ValueError("wavelengths must be strictly increasing")
        if resp.shape[1] != wl.size:
            raise ValueError(f"responses have {resp.shape[1]} samples, grid has {wl.size}")
        if not np.all(np.isfinite(resp)) or np.any(resp < 0):
            raise ValueError("responses must be finite and non-negative")
        if np.any(resp.max(axis=1) <= 0):
            raise ValueError("every response curve needs at least one positive sample")
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "responses", resp)

    @property
    def n_bands(self):
        return self.responses.shape[0]


def gaussian_responses(centers=None, fwhm=30.0, wavelengths=None):
    """Gaussian filter curves, the stand-in for tabulated camera responses.

    Defaults: 16 centres evenly staggered over 460-630 nm, FWHM 30 nm,
    sampled every 1 nm over 400-700 nm.
    """
    centers = np.linspace(460.0, 630.0, 16) if centers is None else np.asarray(centers, float)
    wavelengths = np.arange(400.0, 701.0) if wavelengths is None else np.asarray(wavelengths, float)
    sigma = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    resp = np.exp(-0.5 * ((wavelengths[None, :] - centers[:, None]) / sigma) ** 2)
    return SpectralResponseSet(wavelengths, resp)


def wasserstein_1d(p, q, wavelengths):
    """First-order Wasserstein distance (in wavelength units) between two
    response curves, each normalised to unit mass on the sample grid.

    The CDFs are step functions between samples, so the distance is
    ``sum_k |P_k - Q_k| * (w_{k+1} - w_k)``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    wl = np.asarray(wavelengths, dtype=float)
    if p.shape != wl.shape or q.shape != wl.shape:
        raise ValueError("curves and wavelength grid must have equal length")
    p_mass, q_mass = p.sum(), q.sum()
    if not p_mass > 0 or not q_mass > 0:
        raise ValueError("cannot normalise a response curve with zero total mass")
    cdf_gap = np.cumsum(p / p_mass - q / q_mass)[:-1]
    return float(np.sum(np.abs(cdf_gap) * np.diff(wl)))


def distance_matrix(responses):
    """Pairwise ``wasserstein_1d`` distances in nm, shape ``(C, C)``."""
    resp = responses.responses
    cdfs = np.cumsum(resp / resp.sum(axis=1, keepdims=True), axis=1)[:, :-1]
    widths = np.diff(responses.wavelengths)
    dist = np.abs(cdfs[:, None, :] - cdfs[None, :, :]) @ widths
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def weight_matrix(responses, tau, unit_nm=DISTANCE_UNIT_NM):
    """``exp(-W / tau)`` for every band pair, with ``W`` expressed in
    multiples of ``unit_nm`` nanometres."""
    tau = check_positive(tau, "tau")
    unit_nm = check_positive(unit_nm, "unit_nm")
    w = np.exp(-distance_matrix(responses) / unit_nm / tau)
    # keep entries strictly positive even when the exponent underflows
    w = np.maximum(w, np.finfo(float).tiny)
    np.fill_diagonal(w, 1.0)
    return w


def load_responses(path):
    """Read a response CSV with header ``wavelength_nm,b0,...,b{C-1}``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0].strip() != "wavelength_nm":
        raise ValueError(f"{path}: header must start with 'wavelength_nm'")
    data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    if data.ndim != 2 or data.shape[1] != len(rows[0]):
        raise ValueError(f"{path}: ragged or empty response table")
    return SpectralResponseSet(data[:, 0], data[:, 1:].T)


def save_responses(responses, path):
    header = ["wavelength_nm"] + [f"b{c}" for c in range(responses.n_bands)]
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, wl in enumerate(responses.wavelengths):
            writer.writerow([repr(float(wl))] + [repr(float(v)) for v in responses.responses[:, k]])
