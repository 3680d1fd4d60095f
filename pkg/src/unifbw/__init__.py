"""Uniform-in-bandwidth kernel estimators and smoothed empirical likelihood."""

from unifbw.kernels import Kernel, eval_kernel, get_kernel, l2_norm_sq, product_kernel
from unifbw.model import Cell, Dataset, SimulationModel, centring_m, sample, true_prob, true_sigma2
from unifbw.estimators import (
    DeviationStat,
    FunctionClassEntry,
    el_weights,
    nw_regression,
    sup_deviation,
    w_process,
    xn_sn_un,
)
from unifbw.el import (
    ConfidenceInterval,
    ELSolution,
    HullError,
    confidence_interval,
    convex_hull_check,
    log_ratio,
    solve_lambda,
    theorem3_statistic,
)
from unifbw.bandwidth import (
    BandwidthGrid,
    cv_score,
    geometric_grid,
    paper_bandwidth_interval,
    select_cv_bandwidth,
)
from unifbw.density import DensityEstimate, lscv_bandwidth, pr_density

__version__ = "0.1.0"
