"""Numerical companion to a multivariate Berry-Esseen bound with explicit
constants: Gaussian-perimeter bounds for convex sets, the constant bootstrap,
generalized signed distances with smoothing, Stein/Slepian checks and
simulation of the central-limit error.
"""

from ._golden import ConvergenceError
from .constants import (BETA_STAR, ConstantBundle, coefficient_certificates,
                        constant_bundle, convex_class_constant, k_bound_affine,
                        k_bound_general, k_general, sigma_star)
from .geometry import (FIGURE_SET, Ball, Empty, FullSpace, HalfSpace, IntervalUnion,
                       SmoothingProfile, assumption_audit, interval_union_perimeter_bound,
                       lipschitz_probe, offset_set, rho, smooth_indicator, smoothing_g)
from .montecarlo import (SimulationConfig, SimulationReport, SummandSpec,
                         annulus_inequality_check, normal_measure, run_simulation)
from .perimeter import (PUBLISHED_TABLE, PerimeterQuery, PerimeterResult,
                        analytic_perimeter, gamma_bar_d, gamma_bar_dp, k_of_p,
                        perimeter_upper_bound, perimeter_upper_bound_linear, xi1)
from .specialfns import (Quadrature, c_constant, gaussian_density, inf_mills,
                         mills_ratio, radial_moment)
from .stein import (DiscreteSum, SmoothTestFunction, derivative_pairing_check,
                    slepian_identity_check, stein_apply, u_alpha)

__version__ = "0.1.0"
