"""tfwave: numerical toolkit for time-fractional wave equations of order
alpha in (1, 2): Mittag-Leffler evaluation on the real axis, spectral
forward solvers, long-time asymptotics and sign stabilization, and
single-point inverse recovery of a separated source's temporal factor.
"""

__version__ = "0.1.0"

from .gammafn import GammaPoleError, gamma, loggamma, rgamma
from .ml import (MLAccuracyError, MLDomainError, MLQuery, bound_constant, ml,
                 ml_leading, ml_vec)
from .eigensystem import (Eigensystem, SpectralField, apply_inverse_A,
                          dirichlet_laplacian_1d, dnorm, evaluate_at, project,
                          sturm_liouville_fd, truncation_tail_bound)
from .timegrid import TimeGrid
from .forward import (CoefficientHistory, HomogeneousProblem, PointTrajectory,
                      SeparatedSource, observe, rl_integral, solution_at,
                      solve_homogeneous, solve_inhomogeneous,
                      solve_inhomogeneous_modal)
from .asymptotics import (AsymptoticsReport, InconclusiveSignError,
                          count_sign_changes, detect_sign, fit_decay_rate,
                          leading_term, remainder_norm, sign_change_census)
from .inverse import (DeconvolutionResult, DuhamelKernel, IllPosedKernelError,
                      deconvolve, duhamel_kernel, forward_convolve,
                      titchmarsh_onset)

__all__ = [
    "__version__",
    "GammaPoleError", "gamma", "loggamma", "rgamma",
    "MLAccuracyError", "MLDomainError", "MLQuery", "bound_constant", "ml",
    "ml_leading", "ml_vec",
    "Eigensystem", "SpectralField", "apply_inverse_A", "dirichlet_laplacian_1d",
    "dnorm", "evaluate_at", "project", "sturm_liouville_fd",
    "truncation_tail_bound",
    "TimeGrid",
    "CoefficientHistory", "HomogeneousProblem", "PointTrajectory",
    "SeparatedSource", "observe", "rl_integral", "solution_at",
    "solve_homogeneous", "solve_inhomogeneous", "solve_inhomogeneous_modal",
    "AsymptoticsReport", "InconclusiveSignError", "count_sign_changes",
    "detect_sign", "fit_decay_rate", "leading_term", "remainder_norm",
    "sign_change_census",
    "DeconvolutionResult", "DuhamelKernel", "IllPosedKernelError", "deconvolve",
    "duhamel_kernel", "forward_convolve", "titchmarsh_onset",
]
