"""Poisson kernels and Green functions of balls for hyperbolic Brownian
motion on the ball model, computed three independent ways: Gegenbauer
spectral series, closed-form integral representations (dimensions 4 and 6),
and Monte Carlo simulation of the underlying stochastic differential
equations."""

__version__ = "0.1.0"

from .specfun import Dimension, F_k, G_k, gegenbauer, gegenbauer_at_one, hyp2f1, pochhammer, wronskian_residual
from .geometry import BallDomain, Point, cos_angle, hyperbolic_distance, hyperbolic_radius, sphere_area
from .kernels import (
    GegenbauerSpectrum,
    SeriesControl,
    green_coefficient,
    green_function,
    poisson_coefficient,
    poisson_from_green_derivative,
    poisson_kernel,
    spectrum_of,
)
from .closedform import (
    LaplaceWeight,
    QuadratureControl,
    H_function,
    conjecture1_residual,
    conjecture2_zero_count,
    f_entire,
    green_closed_n4,
    green_closed_n6,
    h_factor,
    L_factor,
    laplace_weight,
    poisson_integral,
)
from .mc_sim import ExitSamples, SdeConfig, empirical_exit_density, estimate_gauge, simulate_cartesian, simulate_polar
