"""Binary hypercube files and the key = value configuration format.

Cube file layout::

    HSC1\\n
    X Y C lo hi\\n
    <X*Y*C little-endian float32, band-major, then row (y), then column (x)>

Snapshots are stored as single-band cubes.
"""

from pathlib import Path

import numpy as np

MAGIC = b"HSC1\n"


class CubeFormatError(ValueError):
    """Malformed cube file."""


def save_cube(cube, path, value_range=(0.0, 1.0)):
    cube = np.asarray(cube)
    if cube.ndim == 2:
        cube = cube[:, :, None]
    if cube.ndim != 3:
        raise ValueError(f"expected a (height, width, bands) array, got shape {cube.shape}")
    height, width, bands = cube.shape
    lo, hi = (float(v) for v in value_range)
    header = f"{width} {height} {bands} {lo!r} {hi!r}\n".encode("ascii")
    payload = np.ascontiguousarray(np.transpose(cube, (2, 0, 1)), dtype="<f4").tobytes()
    Path(path).write_bytes(MAGIC + header + payload)


def load_cube(path, return_range=False):
    """Read a cube file as a float32 ``(height, width, bands)`` array."""
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise CubeFormatError(f"{path}: bad magic at byte 0, expected {MAGIC!r}, "
                              f"got {raw[:len(MAGIC)]!r}")
    offset = len(MAGIC)
    end = raw.find(b"\n", offset)
    if end < 0:
        raise CubeFormatError(f"{path}: unterminated header starting at byte {offset}")
    fields = raw[offset:end].split()
    try:
        if len(fields) != 5:
            raise ValueError
        width, height, bands = (int(v) for v in fields[:3])
        lo, hi = (float(v) for v in fields[3:])
    except ValueError:
        raise CubeFormatError(f"{path}: header at byte {offset} must be 'X Y C lo hi', "
                              f"got {raw[offset:end]!r}") from None
    if min(width, height, bands) < 1:
        raise CubeFormatError(f"{path}: non-positive dimensions in header at byte {offset}")
    start = end + 1
    expected = 4 * width * height * bands
    actual = len(raw) - start
    if actual != expected:
        raise CubeFormatError(f"{path}: payload at byte {start} should hold {expected} bytes "
                              f"for {width}x{height}x{bands}, found {actual}")
    data = np.frombuffer(raw, dtype="<f4", offset=start).reshape(bands, height, width)
    cube = np.transpose(data, (1, 2, 0)).astype(np.float32)
    return (cube, (lo, hi)) if return_range else cube


def save_mosaic(snapshot, path, value_range=(0.0, 1.0)):
    save_cube(np.asarray(snapshot)[:, :, None], path, value_range)


def load_mosaic(path):
    cube = load_cube(path)
    if cube.shape[2] != 1:
        raise CubeFormatError(f"{path}: a snapshot file must hold exactly one band, "
                              f"found {cube.shape[2]}")
    return cube[:, :, 0]


def load_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    config = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        config[key.strip().replace("-", "_")] = value.strip()
    return config
