"""Projected Adam descent on the regularization energy.

The iterate is re-projected onto the set of cubes consistent with the
snapshot after every step, so the data-fidelity term is identically zero
and only the regularizer is minimized.
"""

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_nonnegative, check_positive, check_snapshot
from .energy import RegWeights, total_reg
from .msfa import bilinear_demosaic, override_apply

logger = logging.getLogger(__name__)

TRACE_HEADER = ("iter", "r_corr", "r_tik", "r_tv", "r_total")


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 2000
    step_size: float = 1e-3
    beta1: float = 0.5
    beta2: float = 0.99
    eps: float = 1e-8
    stop_tol: float = 1e-6
    log_every: int = 10

    def __post_init__(self):
        check_positive(self.step_size, "step_size")
        check_positive(self.eps, "eps")
        check_nonnegative(self.stop_tol, "stop_tol")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {value}")
        if int(self.max_iters) < 0:
            raise ValueError("max_iters must be non-negative")
        if int(self.log_every) < 1:
            raise ValueError("log_every must be at least 1")


@dataclass
class SolveTrace:
    records: list = field(default_factory=list)
    n_iter: int = 0
    stop_reason: str = ""

    def log(self, iteration, report):
        self.records.append((iteration, float(report.r_corr), float(report.r_tik),
                             float(report.r_tv), float(report.r_total)))

    @property
    def energies(self):
        return np.array([r[4] for r in self.records])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_HEADER)
            for it, *values in self.records:
                writer.writerow([it] + [repr(v) for v in values])


def read_trace_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {header}")
        records = [(int(row[0]),) + tuple(float(v) for v in row[1:]) for row in reader if row]
    return SolveTrace(records=records, n_iter=records[-1][0] if records else 0)


class SolverDivergenceError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def solve(snapshot, pattern, weights, rw=None, cfg=None, init=None):
    """Demosaic ``snapshot`` by minimizing the regularizer over consistent cubes.

    Starts from the bilinear reconstruction (or ``init``) and returns the
    lowest-energy iterate together with its :class:`SolveTrace`.
    """
    rw = RegWeights() if rw is None else rw
    cfg = SolverConfig() if cfg is None else cfg
    snapshot = check_snapshot(snapshot)
    cube = bilinear_demosaic(snapshot, pattern) if init is None else np.array(init, dtype=float)
    cube = override_apply(cube, snapshot, pattern)
    free = ~pattern.sample_mask(*snapshot.shape)

    trace = SolveTrace()
    m = np.zeros_like(cube)
    v = np.zeros_like(cube)
    best, best_energy = cube, np.inf
    window_start = None
    it = 0
    while True:
        report = total_reg(cube, weights, rw)
        if not np.isfinite(report.r_total) or not np.all(np.isfinite(report.gradient)):
            trace.log(it, report)
            trace.n_iter, trace.stop_reason = it, "diverged"
            raise SolverDivergenceError(f"non-finite energy or gradient at iteration {it}", trace)
        if report.r_total < best_energy:
            best, best_energy = cube, report.r_total
        grad = report.gradient

        logged = it % cfg.log_every == 0
        if logged:
            trace.log(it, report)
            logger.debug("iter %d: energy %.6g", it, report.r_total)

        if not np.any(grad[free]):
            trace.stop_reason = "stationary"
            break
        if logged:
            if window_start is not None:
                e0 = window_start
                drop = abs(e0 - report.r_total) / (cfg.log_every * max(abs(e0), np.finfo(float).tiny))
                if drop < cfg.stop_tol:
                    trace.stop_reason = "converged"
                    break
            window_start = report.r_total
        if it >= cfg.max_iters:
            trace.stop_reason = "max_iters"
            break

        it += 1
        m = cfg.beta1 * m + (1 - cfg.beta1) * grad
        v = cfg.beta2 * v + (1 - cfg.beta2) * grad * grad
        m_hat = m / (1 - cfg.beta1 ** it)
        v_hat = v / (1 - cfg.beta2 ** it)
        cube = override_apply(cube - cfg.step_size * m_hat / (np.sqrt(v_hat) + cfg.eps),
                              snapshot, pattern)

    if trace.records[-1][0] != it:
        trace.log(it, report)
    trace.n_iter = it
    return best, trace
