"""Numerical laboratory for radial sign-changing solutions of the critical
semilinear problem on the unit ball, studied through its singular-ODE
(Emden-Fowler) formulation."""

from .specfun import (BubbleSpec, DimensionParams, DomainError, alpha_fn,
                      alpha_zero, bessel_j, bubble_eval, gamma_fn,
                      radial_eigenvalue, sobolev_constant)
from .shooting import (ConfigurationError, NumericError, ShootingInput,
                       ShootingResult, Trajectory, evaluate, solve_shooting,
                       tail_start)
from .transform import (RadialProfile, RescaledProfile, build_radial_profile,
                        lambda_n_of_gamma, ode_residual, rescale_positive_part)
from .analysis import (EnergyReport, FitReport, energy, fit_power_law,
                       lambda0_six, lambda2_limit_study, negative_part_study,
                       slope_law_check, t0_y0_asymptotics)

__version__ = "0.1.0"
