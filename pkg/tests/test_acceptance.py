"""Acceptance suite: one test and one PASS/FAIL line per criterion."""

import time

import numpy as np
import pytest

from _oracles import central_fd, sam_loop, ssim_naive, tv_fd_decimal
from hsdemosaic.energy import RegWeights, total_reg
from hsdemosaic.io import CubeFormatError, load_cube, save_cube
from hsdemosaic.metrics import psnr, sam, ssim
from hsdemosaic.msfa import MsfaPattern, bilinear_demosaic, mosaic_apply, override_apply
from hsdemosaic.phantom import PhantomSpec, gen_phantom
from hsdemosaic.ranking import fit_bradley_terry
from hsdemosaic.solver import solve
from hsdemosaic.spectral import (SpectralResponseSet, gaussian_responses, wasserstein_1d,
                                 weight_matrix)

DEFAULT_RW = RegWeights(lambda_tik=1.0, lambda_tv=1e-3, lambda_corr=1.0, tau=0.1)


def _rel_err(analytic, fd):
    return float(np.max(np.abs(analytic - fd) / (np.abs(fd) + 1e-12)))


def _random_pattern(rng):
    n = int(rng.integers(1, 6))
    c = int(rng.integers(1, n * n + 1))
    grid = np.concatenate([np.arange(c), rng.integers(0, c, n * n - c)])
    return MsfaPattern(rng.permutation(grid).reshape(n, n), n_bands=c)


def test_bradley_terry_reproduction(criterion):
    wins = [[0, 13, 10], [107, 0, 57], [110, 63, 0]]
    start = time.perf_counter()
    res = fit_bradley_terry(wins)
    elapsed = time.perf_counter() - start
    target = np.array([0.050, 0.445, 0.505])
    dev = float(np.max(np.abs(res.pi - target)))
    ok = dev <= 0.01 and elapsed < 1.0 and res.converged
    assert criterion(1, "Bradley-Terry on the vote table", ok,
                     f"pi={np.round(res.pi, 4).tolist()}, max dev {dev:.4f} <= 0.01, "
                     f"{elapsed * 1e3:.1f} ms")


GRADIENT_SHAPES = [(8, 8, 4), (16, 16, 16), (8, 10, 4), (9, 8, 5), (10, 10, 4), (8, 12, 6),
                   (12, 8, 4), (11, 9, 5), (8, 8, 8), (10, 12, 4), (12, 12, 4), (9, 11, 6),
                   (14, 8, 4), (8, 16, 4), (13, 10, 5), (10, 9, 7), (16, 8, 5), (12, 10, 6),
                   (8, 14, 8), (16, 16, 4)]


def test_gradient_oracle_suite(criterion):
    start = time.perf_counter()
    worst = {"tik": 0.0, "corr": 0.0, "tv": 0.0, "total": 0.0}
    for seed, shape in enumerate(GRADIENT_SHAPES):
        rng = np.random.default_rng(1000 + seed)
        cube = rng.random(shape)
        c = shape[2]
        w = rng.uniform(0.05, 1.0, (c, c))
        w = (w + w.T) / 2
        np.fill_diagonal(w, 1.0)
        analytic = {
            "tik": total_reg(cube, w, RegWeights(1.0, 0.0, 0.0)).gradient,
            "tv": total_reg(cube, w, RegWeights(0.0, 1.0, 0.0)).gradient,
            "corr": total_reg(cube, w, RegWeights(0.0, 0.0, 1.0)).gradient,
            "total": total_reg(cube, w, DEFAULT_RW).gradient,
        }

        def values(x):
            rep = total_reg(x, w, DEFAULT_RW, need_grad=False)
            return rep.r_tik, rep.r_corr, rep.r_total

        # 80-bit central differences; the step sits below every |difference|
        # the TV smoothing can see, so the stencil never straddles its kink
        fd_tik, fd_corr, fd_total = central_fd(values, cube, h=1e-7)
        fd = {"tik": fd_tik, "corr": fd_corr, "total": fd_total, "tv": tv_fd_decimal(cube)}
        for key in worst:
            worst[key] = max(worst[key], _rel_err(analytic[key], fd[key]))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-5 and elapsed < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert criterion(2, f"gradients on {len(GRADIENT_SHAPES)} random cubes", ok,
                     f"max rel err {detail} < 1e-5, {elapsed:.1f} s")


def test_projection_invariant(criterion):
    rng = np.random.default_rng(2024)
    exact = 0
    for _ in range(100):
        pattern = _random_pattern(rng)
        h, w = rng.integers(1, 20, 2)
        cube = rng.normal(size=(h, w, pattern.n_bands))
        snap = rng.normal(size=(h, w))
        exact += np.array_equal(mosaic_apply(override_apply(cube, snap, pattern), pattern), snap)

    solved = 0
    setups = [(MsfaPattern.default(), 16, 24), (MsfaPattern(np.arange(9).reshape(3, 3)), 9, 18),
              (MsfaPattern(np.array([[0, 1], [2, 1]])), 3, 16)]
    for k, (pattern, bands, size) in enumerate(setups):
        truth = gen_phantom(PhantomSpec(width=size, height=size, bands=bands, seed=k))
        snap = mosaic_apply(truth, pattern)
        weights = weight_matrix(gaussian_responses(np.linspace(460, 630, bands)), DEFAULT_RW.tau)
        cube, _ = solve(snap, pattern, weights, DEFAULT_RW)
        solved += np.array_equal(mosaic_apply(cube, pattern), snap)
    ok = exact == 100 and solved == len(setups)
    assert criterion(3, "projection invariant", ok,
                     f"{exact}/100 random pairs exact, {solved}/{len(setups)} full solves exact")


@pytest.mark.slow
def test_baseline_improvement(criterion):
    pattern = MsfaPattern.default()
    weights = weight_matrix(gaussian_responses(), DEFAULT_RW.tau)
    base_psnr, var_psnr, base_sam, var_sam, times = [], [], [], [], []
    for seed in range(10):
        truth = gen_phantom(PhantomSpec(width=64, height=64, bands=16, kind="edges", seed=seed))
        snap = mosaic_apply(truth, pattern)
        base = bilinear_demosaic(snap, pattern)
        start = time.perf_counter()
        cube, _ = solve(snap, pattern, weights, DEFAULT_RW)
        times.append(time.perf_counter() - start)
        base_psnr.append(psnr(base, truth))
        var_psnr.append(psnr(cube, truth))
        base_sam.append(sam(base, truth))
        var_sam.append(sam(cube, truth))
    bp, vp = np.mean(base_psnr), np.mean(var_psnr)
    bs, vs = np.mean(base_sam), np.mean(var_sam)
    ok = vp > bp and vs < bs and max(times) <= 30
    assert criterion(4, "variational beats bilinear on 10 edge phantoms", ok,
                     f"PSNR {bp:.2f} -> {vp:.2f} dB, SAM {bs:.4f} -> {vs:.4f} rad, "
                     f"slowest solve {max(times):.1f} s <= 30 s")


def test_metric_sanity(criterion):
    rng = np.random.default_rng(5)
    a = rng.random((16, 16, 4)) + 0.01
    checks = {
        "ssim(a,a)=1": abs(ssim(a, a) - 1.0) < 1e-12,
        "psnr(a,a)=inf": psnr(a, a) == float("inf"),
        "sam(2.7a,a)=0": sam(2.7 * a, a) < 1e-12,
    }
    worst_ssim = worst_sam = 0.0
    for _ in range(4):
        x, y = rng.random((14, 13, 3)), rng.random((14, 13, 3))
        worst_ssim = max(worst_ssim, abs(ssim(x, y) - ssim_naive(x, y)))
        worst_sam = max(worst_sam, abs(sam(x, y) - sam_loop(x, y)))
    ok = all(checks.values()) and worst_ssim < 1e-6 and worst_sam < 1e-6
    assert criterion(5, "metric sanity", ok,
                     f"{sum(checks.values())}/3 identities, oracle gaps ssim {worst_ssim:.1e} "
                     f"sam {worst_sam:.1e} < 1e-6")


def test_wasserstein_weights(criterion):
    rng = np.random.default_rng(6)
    grid = np.arange(400.0, 701.0)
    responses = SpectralResponseSet(grid, rng.random((8, grid.size)))
    w = weight_matrix(responses, 0.1)
    props = (np.array_equal(w, w.T) and np.all(np.diag(w) == 1)
             and np.all(w > 0) and np.all(w <= 1))

    one_hot_err = 0.0
    for _ in range(20):
        i, j = rng.integers(0, grid.size, 2)
        p, q = np.zeros(grid.size), np.zeros(grid.size)
        p[i], q[j] = 1.0, 1.0
        one_hot_err = max(one_hot_err, abs(wasserstein_1d(p, q, grid) - abs(grid[i] - grid[j])))

    centres = np.linspace(460, 630, 16)
    heat = weight_matrix(gaussian_responses(centres), 0.1).ravel()
    sep = np.abs(centres[:, None] - centres[None, :]).ravel()
    farther = sep[:, None] < sep[None, :] - 1e-9
    monotone = bool(np.all(heat[:, None] >= heat[None, :], where=farther))
    ok = props and one_hot_err < 1e-9 and monotone
    assert criterion(6, "transport weight matrix", ok,
                     f"symmetric/unit diagonal/(0,1]: {props}, one-hot error {one_hot_err:.1e}, "
                     f"heatmap monotone: {monotone}")


def test_bilinear_affine_exactness(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(20):
        pattern = MsfaPattern.default() if trial % 2 else MsfaPattern(
            rng.permutation(9).reshape(3, 3))
        n, c = pattern.n, pattern.n_bands
        h, w = rng.integers(2 * n, 8 * n, 2)
        yy, xx = np.mgrid[0:h, 0:w].astype(float)
        coef = rng.uniform(-2, 2, (c, 3))
        cube = coef[:, 0] * xx[..., None] + coef[:, 1] * yy[..., None] + coef[:, 2]
        out = bilinear_demosaic(mosaic_apply(cube, pattern), pattern)
        for band in range(c):
            j, i = np.argwhere(pattern.band_of == band)[0]
            rows, cols = np.arange(j, h, n), np.arange(i, w, n)
            inner = (slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1), band)
            worst = max(worst, float(np.max(np.abs(out[inner] - cube[inner]))))
    assert criterion(7, "bilinear exactness on affine bands", worst < 1e-12,
                     f"max interior error {worst:.1e} < 1e-12 over 20 images")


def test_format_round_trip(criterion, tmp_path):
    rng = np.random.default_rng(8)
    exact = 0
    for k in range(50):
        shape = tuple(rng.integers(1, 12, 3))
        cube = rng.normal(size=shape).astype(np.float32)
        cube.ravel()[rng.integers(0, cube.size)] = rng.choice([0.0, -0.0, np.inf, np.nan])
        path = tmp_path / f"c{k}.hsc"
        save_cube(cube, path)
        exact += load_cube(path).tobytes() == cube.tobytes()

    raw = (tmp_path / "c0.hsc").read_bytes()
    header_end = raw.index(b"\n", 5) + 1
    corrupt = [raw[:n] for n in range(len(raw))] + [raw + b"\0" * n for n in (1, 3, 4)]
    corrupt += [raw[:k] + b"X" + raw[k + 1:] for k in range(5)]
    rejected = 0
    for k, data in enumerate(corrupt):
        (tmp_path / "bad.hsc").write_bytes(data)
        try:
            load_cube(tmp_path / "bad.hsc")
        except CubeFormatError:
            rejected += 1

    # arbitrary header bytes: either a clean format error or a parsed cube
    crashes = 0
    for _ in range(300):
        data = bytearray(raw)
        data[rng.integers(5, header_end)] = rng.integers(0, 256)
        (tmp_path / "bad.hsc").write_bytes(bytes(data))
        try:
            load_cube(tmp_path / "bad.hsc")
        except CubeFormatError:
            pass
        except Exception:
            crashes += 1
    ok = exact == 50 and rejected == len(corrupt) and crashes == 0
    assert criterion(8, "cube file round trip", ok,
                     f"{exact}/50 bit-exact, {rejected}/{len(corrupt)} corrupted files rejected, "
                     f"{crashes} crashes on 300 header mutations")
