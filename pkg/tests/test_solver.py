import numpy as np
import pytest

from hsdemosaic.energy import RegWeights, total_reg
from hsdemosaic.metrics import psnr, sam
from hsdemosaic.msfa import MsfaPattern, bilinear_demosaic, mosaic_apply
from hsdemosaic.phantom import PhantomSpec, gen_phantom
from hsdemosaic.solver import (SolverConfig, SolverDivergenceError, read_trace_csv, solve)
from hsdemosaic.spectral import gaussian_responses, weight_matrix

DEFAULT_RW = RegWeights(lambda_tik=1.0, lambda_tv=1e-3, lambda_corr=1.0, tau=0.1)
PATTERN = MsfaPattern.default()
WEIGHTS = weight_matrix(gaussian_responses(), 0.1)


@pytest.fixture(scope="module")
def phantom():
    truth = gen_phantom(PhantomSpec(width=32, height=32, bands=16, kind="edges", seed=3))
    return truth, mosaic_apply(truth, PATTERN)


def test_constant_scene_stops_immediately():
    snap = np.full((16, 16), 0.4)
    cube, trace = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, SolverConfig(stop_tol=1e-9))
    assert np.all(cube == 0.4)
    assert trace.n_iter == 0 and trace.stop_reason == "stationary"
    assert trace.records[0] == (0, 0.0, 0.0, 0.0, 0.0)


def test_tikhonov_only_descends(phantom):
    _, snap = phantom
    rw = RegWeights(lambda_tik=1.0, lambda_tv=0.0, lambda_corr=0.0)
    init = total_reg(bilinear_demosaic(snap, PATTERN), WEIGHTS, rw, need_grad=False).r_tik
    cube, _ = solve(snap, PATTERN, WEIGHTS, rw, SolverConfig(max_iters=300))
    assert total_reg(cube, WEIGHTS, rw, need_grad=False).r_tik <= init
    # a fixed Adam step ends up circling the minimum at roughly its own size,
    # so monotonicity is checked with a step small enough to stay outside that
    _, trace = solve(snap, PATTERN, WEIGHTS, rw,
                     SolverConfig(max_iters=300, log_every=5, step_size=3e-4))
    assert np.all(np.diff(trace.energies) <= 0)


def test_zero_weights_return_bilinear(phantom):
    _, snap = phantom
    cube, trace = solve(snap, PATTERN, WEIGHTS, RegWeights(0.0, 0.0, 0.0))
    np.testing.assert_array_equal(cube, bilinear_demosaic(snap, PATTERN))
    assert trace.stop_reason == "stationary"


def test_output_is_consistent_and_energy_drops(phantom):
    _, snap = phantom
    cube, trace = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, SolverConfig(max_iters=200))
    np.testing.assert_array_equal(mosaic_apply(cube, PATTERN), snap)
    start = total_reg(bilinear_demosaic(snap, PATTERN), WEIGHTS, DEFAULT_RW, need_grad=False).r_total
    assert total_reg(cube, WEIGHTS, DEFAULT_RW, need_grad=False).r_total <= start
    assert trace.stop_reason in {"converged", "max_iters"}
    assert all(np.isfinite(r[4]) for r in trace.records)


def test_solver_is_deterministic(phantom):
    _, snap = phantom
    cfg = SolverConfig(max_iters=50)
    a, ta = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, cfg)
    b, tb = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, cfg)
    np.testing.assert_array_equal(a, b)
    assert ta.records == tb.records


def test_beats_bilinear_on_shared_edge_phantom(phantom):
    truth, snap = phantom
    base = bilinear_demosaic(snap, PATTERN)
    cube, _ = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW)
    assert psnr(cube, truth) > psnr(base, truth)
    assert sam(cube, truth) < sam(base, truth)


def test_max_iters_zero_returns_initialization(phantom):
    _, snap = phantom
    cube, trace = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, SolverConfig(max_iters=0))
    np.testing.assert_array_equal(cube, bilinear_demosaic(snap, PATTERN))
    assert trace.n_iter == 0 and trace.stop_reason == "max_iters"


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises_with_trace():
    snap = np.random.default_rng(0).random((8, 8))
    init = np.random.default_rng(1).random((8, 8, 16)) * 1e200
    with pytest.raises(SolverDivergenceError) as info:
        solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, init=init)
    assert info.value.trace.stop_reason == "diverged"
    assert len(info.value.trace.records) == 1


def test_trace_csv_round_trip(phantom, tmp_path):
    _, snap = phantom
    _, trace = solve(snap, PATTERN, WEIGHTS, DEFAULT_RW, SolverConfig(max_iters=40))
    trace.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "iter,r_corr,r_tik,r_tv,r_total"
    back = read_trace_csv(tmp_path / "t.csv")
    assert back.records == trace.records
    assert [r[0] for r in trace.records][:3] == [0, 10, 20]


def test_trace_csv_bad_header(tmp_path):
    (tmp_path / "t.csv").write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_trace_csv(tmp_path / "t.csv")


@pytest.mark.parametrize("kwargs", [{"step_size": 0}, {"beta1": 1.0}, {"beta2": -0.1},
                                    {"stop_tol": -1}, {"log_every": 0}, {"max_iters": -1}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)
