"""Physical constants (SI) and unit conversions used throughout the package."""
import math

HBAR = 1.0545718e-34  # J s
K_B = 1.380649e-23  # J / K
C = 299792458.0  # m / s
EV = 1.602176634e-19  # J
EPS0_SI = 8.8541878128e-12  # F / m

#: angular frequency (rad/s) corresponding to 1 eV
EV_TO_RAD_S = EV / HBAR


def ev_to_rad_s(value):
    return value * EV_TO_RAD_S


def rad_s_to_ev(value):
    return value / EV_TO_RAD_S


def sigma_si_to_gaussian(sigma_si):
    """Convert a dc conductivity in S/m to Gaussian frequency units (rad/s).

    With this convention ``4*pi*sigma/xi`` is dimensionless.
    """
    return sigma_si / (4.0 * math.pi * EPS0_SI)
