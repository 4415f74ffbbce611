"""Unsupervised hyperspectral snapshot-mosaic demosaicking."""

from .energy import EnergyReport, RegWeights, corr_pair, corr_reg, grad_x, grad_y, \
    tikhonov_reg, total_reg, tv_reg
from .estimators import BilinearDemosaicer, BradleyTerry, VariationalDemosaicer
from .io import CubeFormatError, load_cube, load_mosaic, save_cube, save_mosaic
from .metrics import MetricReport, evaluate, psnr, sam, ssim
from .msfa import MsfaPattern, bilinear_demosaic, load_pattern, mosaic_apply, override_apply
from .phantom import PhantomSpec, gen_phantom
from .ranking import DegenerateTableError, PreferenceScale, fit_bradley_terry
from .render import RgbProjection, default_projection, to_rgb, write_rgb
from .solver import SolveTrace, SolverConfig, SolverDivergenceError, solve
from .spectral import SpectralResponseSet, gaussian_responses, wasserstein_1d, weight_matrix

__version__ = "0.1.0"
