"""Convolution structures on Weyl chambers.

Product formulas on the doubled chamber C_q x R realized two ways: exact
Gauss quadrature at rank 1 and Monte Carlo kernel sampling at general rank,
together with the samplers, special functions, invariant densities, and
verification functionals they rest on.
"""

from . import backend
from .chamber import (ChamberPoint, HypergroupElement, Multiplicity,
                      SpectralParameter, multiplicity_from, project_to_chamber,
                      rho, rho_from_triple)
from .checks import (check_associativity, check_commutativity,
                     check_constant_character, check_involution,
                     check_section5_formula, scan_positivity)
from .convolution import (convolve_mc, convolve_signed, project_chamber,
                          project_torus, random_walk)
from .haar import check_haar_rank1, haar_density
from .kernel import (KernelSample, abs_h, argument_matrix, branch_im_log_h,
                     kernel_d, make_kernel_sample, weight_real_power)
from .measures import EmpiricalMeasure
from .quadrature import (QuadratureRule, convolve_quadrature_rank1, rank1_rule,
                         rank1_rule_degenerate)
from .report import RunConfig, run_tables, run_verify
from .sampling import (BallCoordinates, kappa, kappa_mc, sample_ball,
                       sample_ball_degenerate, sample_su)
from .special import (JacobiParams, PoleError, c_function, gauss_2f1,
                      jacobi_phi, psi_constant_character, psi_rank1)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
