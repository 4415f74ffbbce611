"""scikit-learn style wrappers around the functional API.

The demosaicers are transformers: ``transform`` maps a snapshot of shape
``(height, width)`` (or a stack ``(n, height, width)``) to hypercube(s) of
shape ``(height, width, bands)``.  They are unsupervised and need no
training data, so ``fit`` only validates parameters and precomputes the
band-pair weights.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .energy import RegWeights
from .msfa import MsfaPattern, bilinear_demosaic
from .ranking import fit_bradley_terry
from .solver import SolverConfig, solve
from .spectral import gaussian_responses, weight_matrix


def _snapshot_stack(X):
    X = check_array(X, dtype=np.float64, ensure_2d=False, allow_nd=True)
    if X.ndim == 2:
        return X[None], True
    if X.ndim == 3:
        return X, False
    raise ValueError(f"expected a snapshot (h, w) or a stack (n, h, w), got shape {X.shape}")


class BilinearDemosaicer(TransformerMixin, BaseEstimator):
    """Per-band bilinear interpolation of the measured samples."""

    def __init__(self, pattern=None):
        self.pattern = pattern

    def fit(self, X=None, y=None):
        self.pattern_ = MsfaPattern.default() if self.pattern is None else self.pattern
        self.n_bands_ = self.pattern_.n_bands
        return self

    def transform(self, X):
        check_is_fitted(self, "pattern_")
        stack, single = _snapshot_stack(X)
        cubes = np.stack([bilinear_demosaic(s, self.pattern_) for s in stack])
        return cubes[0] if single else cubes


class VariationalDemosaicer(TransformerMixin, BaseEstimator):
    """Demosaicking by projected descent on the gradient-consistency,
    Tikhonov and total-variation energy, one image at a time.

    Parameters
    ----------
    pattern : MsfaPattern, optional
        Filter layout; defaults to the row-major 4x4 pattern.
    responses : SpectralResponseSet, optional
        Band response curves used for the pair weights. Defaults to
        Gaussian stand-ins with one curve per band.
    lambda_tik, lambda_tv, lambda_corr, tau : float
        Energy weights and the temperature of the pair weights.
    max_iter, step_size, beta1, beta2, stop_tol, log_every
        Adam and stopping settings, see :class:`SolverConfig`.
    """

    def __init__(self, pattern=None, responses=None, lambda_tik=1.0, lambda_tv=1e-3,
                 lambda_corr=1.0, tau=0.1, max_iter=2000, step_size=1e-3, beta1=0.5,
                 beta2=0.99, stop_tol=1e-6, log_every=10):
        self.pattern = pattern
        self.responses = responses
        self.lambda_tik = lambda_tik
        self.lambda_tv = lambda_tv
        self.lambda_corr = lambda_corr
        self.tau = tau
        self.max_iter = max_iter
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.stop_tol = stop_tol
        self.log_every = log_every

    def fit(self, X=None, y=None):
        self.pattern_ = MsfaPattern.default() if self.pattern is None else self.pattern
        self.n_bands_ = self.pattern_.n_bands
        responses = self.responses
        if responses is None:
            responses = gaussian_responses(np.linspace(460.0, 630.0, self.n_bands_))
        if responses.n_bands != self.n_bands_:
            raise ValueError(f"{responses.n_bands} response curves for {self.n_bands_} bands")
        self.weights_ = weight_matrix(responses, self.tau)
        self.reg_weights_ = RegWeights(lambda_tik=self.lambda_tik, lambda_tv=self.lambda_tv,
                                       lambda_corr=self.lambda_corr, tau=self.tau)
        self.config_ = SolverConfig(max_iters=self.max_iter, step_size=self.step_size,
                                    beta1=self.beta1, beta2=self.beta2,
                                    stop_tol=self.stop_tol, log_every=self.log_every)
        return self

    def demosaic(self, snapshot):
        """Reconstruct one snapshot; returns ``(cube, trace)``."""
        check_is_fitted(self, "weights_")
        return solve(snapshot, self.pattern_, self.weights_, self.reg_weights_, self.config_)

    def transform(self, X):
        stack, single = _snapshot_stack(X)
        cubes = np.stack([self.demosaic(s)[0] for s in stack])
        return cubes[0] if single else cubes


class BradleyTerry(BaseEstimator):
    """Bradley-Terry worths fitted to a ``k x k`` table of pairwise wins.

    After ``fit``, ``scores_`` holds the preference scale (summing to one).
    """

    def __init__(self, max_iter=10000, tol=1e-12):
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        result = fit_bradley_terry(X, max_iters=self.max_iter, tol=self.tol)
        self.scores_ = result.pi
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self

    def predict_proba(self, pairs):
        """Probability that the first method of each ``(i, j)`` row beats the second."""
        check_is_fitted(self, "scores_")
        pairs = np.atleast_2d(np.asarray(pairs, dtype=int))
        pi_i, pi_j = self.scores_[pairs[:, 0]], self.scores_[pairs[:, 1]]
        return pi_i / (pi_i + pi_j)

    def ranking(self):
        """Method indices from most to least preferred."""
        check_is_fitted(self, "scores_")
        return np.argsort(-self.scores_, kind="stable")
