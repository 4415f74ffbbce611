"""Regularization energy for demosaicking and its analytic gradient.

The energy combines three terms on a hypercube ``I`` of shape
``(height, width, bands)``:

* gradient consistency: minus the Pearson correlation between the
  forward-difference gradient maps of every ordered pair of bands,
  weighted by a band-similarity matrix;
* Tikhonov: squared response of the 5-point Laplacian (replicate padding);
* total variation: smoothed anisotropic L1 norm of forward differences.

Every routine is dtype-preserving, so values can be evaluated in
``np.longdouble`` for high-accuracy finite-difference checks.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_cube, check_nonnegative, check_positive


@dataclass(frozen=True)
class RegWeights:
    lambda_tik: float = 1.0
    lambda_tv: float = 1e-3
    lambda_corr: float = 1.0
    tau: float = 0.1
    eps_var: float = 1e-12
    eps_tv: float = 1e-6

    def __post_init__(self):
        for name in ("lambda_tik", "lambda_tv", "lambda_corr"):
            check_nonnegative(getattr(self, name), name)
        for name in ("tau", "eps_var", "eps_tv"):
            check_positive(getattr(self, name), name)


@dataclass
class EnergyReport:
    r_corr: float
    r_tik: float
    r_tv: float
    r_total: float
    gradient: np.ndarray


# -- finite differences ---------------------------------------------------

def _forward_diff(a, axis):
    out = np.zeros_like(a)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    src[axis], dst[axis] = slice(1, None), slice(None, -1)
    out[tuple(dst)] = a[tuple(src)] - a[tuple(dst)]
    return out


def _forward_diff_adjoint(g, axis):
    # the trailing entry of a forward difference is a constant zero, so its
    # cotangent is dropped
    out = np.zeros_like(g)
    head = [slice(None)] * g.ndim
    tail = [slice(None)] * g.ndim
    head[axis], tail[axis] = slice(None, -1), slice(1, None)
    out[tuple(head)] -= g[tuple(head)]
    out[tuple(tail)] += g[tuple(head)]
    return out


def grad_x(image):
    """``I(y, x+1) - I(y, x)``, zero in the last column."""
    image = np.asarray(image)
    if image.ndim < 2 or image.shape[1] < 2:
        raise ValueError(f"need at least two columns, got shape {image.shape}")
    return _forward_diff(image, axis=1)


def grad_y(image):
    """``I(y+1, x) - I(y, x)``, zero in the last row."""
    image = np.asarray(image)
    if image.ndim < 2 or image.shape[0] < 2:
        raise ValueError(f"need at least two rows, got shape {image.shape}")
    return _forward_diff(image, axis=0)


# -- gradient consistency -------------------------------------------------

def _unit_columns(a, eps_var):
    """Centre each column of ``a`` (n x C) and scale it to unit Euclidean norm.

    Columns whose population standard deviation falls below ``eps_var``
    are zeroed; they take no part in any correlation.
    """
    n = a.shape[0]
    centred = a - a.mean(axis=0)
    std = np.sqrt(np.mean(centred * centred, axis=0))
    valid = std >= eps_var
    scale = np.where(valid, np.sqrt(n) * np.where(valid, std, 1), np.inf)
    return centred / scale, scale, valid


def _corr_direction(diff, pair_weights, eps_var, need_grad):
    """Value and gradient (w.r.t. ``diff``) of ``-sum_{c!=d} w_cd corr(d_c, d_d)``."""
    h, w, c = diff.shape
    u, scale, valid = _unit_columns(diff.reshape(-1, c), eps_var)
    corr = u.T @ u
    value = -np.sum(pair_weights * corr)
    if not need_grad:
        return value, None
    sym = pair_weights + pair_weights.T
    # d corr_cd / d a_c = (u_d - corr_cd u_c) / scale_c
    g = u @ sym - u * np.sum(sym * corr, axis=0)
    g = -np.where(valid, g / np.where(valid, scale, 1), 0)
    return value, g.reshape(h, w, c)


def _pair_weights(weights, n_bands, dtype):
    weights = np.asarray(weights, dtype=dtype)
    if weights.shape != (n_bands, n_bands):
        raise ValueError(f"weight matrix must be {n_bands}x{n_bands}, got {weights.shape}")
    weights = weights.copy()
    np.fill_diagonal(weights, 0)
    return weights


def _corr_term(cube, weights, eps_var, need_grad=True):
    pw = _pair_weights(weights, cube.shape[2], cube.dtype)
    vx, gx = _corr_direction(_forward_diff(cube, 1), pw, eps_var, need_grad)
    vy, gy = _corr_direction(_forward_diff(cube, 0), pw, eps_var, need_grad)
    if not need_grad:
        return vx + vy, None
    return vx + vy, _forward_diff_adjoint(gx, 1) + _forward_diff_adjoint(gy, 0)


def corr_pair(cube, c1, c2, eps_var=1e-12):
    """``-corr(dx I^c1, dx I^c2) - corr(dy I^c1, dy I^c2)``, in ``[-2, 2]``."""
    cube = check_cube(cube)
    if c1 == c2:
        raise ValueError("corr_pair needs two distinct bands")
    if cube.shape[0] < 2 or cube.shape[1] < 2:
        raise ValueError(f"bands must be at least 2x2, got {cube.shape[:2]}")
    sub = cube[:, :, [c1, c2]]
    # each ordered pair is counted once with weight 1/2
    half = np.array([[0, 0.5], [0.5, 0]], dtype=cube.dtype)
    value, _ = _corr_term(sub, half, eps_var, need_grad=False)
    return value


def corr_reg(cube, weights, eps_var=1e-12):
    """Weighted sum of ``corr_pair`` over all ordered band pairs ``c1 != c2``."""
    cube = check_cube(cube)
    return _corr_term(cube, weights, eps_var, need_grad=False)[0]


# -- Tikhonov (Laplacian) -------------------------------------------------

def laplacian(cube):
    """5-point Laplacian of every band with replicate padding."""
    p = np.pad(cube, ((1, 1), (1, 1), (0, 0)), mode="edge")
    return (p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:]
            - 4 * p[1:-1, 1:-1])


def laplacian_adjoint(r):
    h, w = r.shape[:2]
    gp = np.zeros((h + 2, w + 2) + r.shape[2:], dtype=r.dtype)
    gp[:-2, 1:-1] += r
    gp[2:, 1:-1] += r
    gp[1:-1, :-2] += r
    gp[1:-1, 2:] += r
    gp[1:-1, 1:-1] -= 4 * r
    # fold the replicate-padding halo back onto the edge pixels
    g = gp[1:-1, 1:-1].copy()
    g[0] += gp[0, 1:-1]
    g[-1] += gp[-1, 1:-1]
    g[:, 0] += gp[1:-1, 0]
    g[:, -1] += gp[1:-1, -1]
    return g


def _tik_term(cube, need_grad=True):
    lap = laplacian(cube)
    value = np.sum(lap * lap)
    return value, (2 * laplacian_adjoint(lap) if need_grad else None)


def tikhonov_reg(cube):
    """Sum of squared Laplacian responses over all bands and pixels."""
    return _tik_term(check_cube(cube), need_grad=False)[0]


# -- total variation ------------------------------------------------------

def _smooth_abs(t, eps):
    # sqrt(t^2 + eps^2) - eps without cancellation; exactly 0 at t == 0
    return t * t / (np.sqrt(t * t + eps * eps) + eps)


def _tv_term(cube, eps_tv, need_grad=True):
    dx = _forward_diff(cube, 1)
    dy = _forward_diff(cube, 0)
    value = np.sum(_smooth_abs(dx, eps_tv)) + np.sum(_smooth_abs(dy, eps_tv))
    if not need_grad:
        return value, None
    # phi'(t) = sign(t) * (1 - defect(t)); the integer sign part and the
    # small defect part go through the adjoint separately so that the
    # near-cancelling +-1 contributions of interior pixels stay exact.
    sx, sy = np.sign(dx), np.sign(dy)
    signs = _forward_diff_adjoint(sx, 1) + _forward_diff_adjoint(sy, 0)
    defects = (_forward_diff_adjoint(sx * _sign_defect(dx, eps_tv), 1)
               + _forward_diff_adjoint(sy * _sign_defect(dy, eps_tv), 0))
    return value, signs - defects


def _sign_defect(t, eps):
    # 1 - |t| / sqrt(t^2 + eps^2), evaluated without cancellation
    r = np.sqrt(t * t + eps * eps)
    return eps * eps / (r * (r + np.abs(t)))


def tv_reg(cube, eps_tv=1e-6):
    """Smoothed anisotropic total variation, ``sum sqrt(t^2 + eps^2) - eps``."""
    return _tv_term(check_cube(cube), eps_tv, need_grad=False)[0]


# -- combined -------------------------------------------------------------

def total_reg(cube, weights, rw=None, need_grad=True):
    """Evaluate every term, their weighted sum and the gradient of the sum."""
    rw = RegWeights() if rw is None else rw
    cube = check_cube(cube)
    grad = np.zeros_like(cube) if need_grad else None

    r_tik, g = _tik_term(cube, need_grad and rw.lambda_tik > 0)
    if g is not None:
        grad += rw.lambda_tik * g
    r_tv, g = _tv_term(cube, rw.eps_tv, need_grad and rw.lambda_tv > 0)
    if g is not None:
        grad += rw.lambda_tv * g
    r_corr, g = _corr_term(cube, weights, rw.eps_var, need_grad and rw.lambda_corr > 0)
    if g is not None:
        grad += rw.lambda_corr * g

    r_total = rw.lambda_tik * r_tik + rw.lambda_tv * r_tv + rw.lambda_corr * r_corr
    return EnergyReport(r_corr=r_corr, r_tik=r_tik, r_tv=r_tv, r_total=r_total, gradient=grad)
