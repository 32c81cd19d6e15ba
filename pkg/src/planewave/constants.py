"""CGS physical constants (CODATA) used throughout the package."""

import math

E_CHARGE = 4.8032047e-10  # statC
R_E = 2.8179403e-13  # classical electron radius, cm
MC2_ERG = 8.18710e-7  # electron rest energy, erg
MC2_MEV = 0.5109989
MC2_EV = MC2_MEV * 1.0e6
MEV_ERG = 1.602177e-6

U_FIRST_HE = 24.0  # eV
U_SECOND_HE = 54.0  # eV


def plasma_constant(n0):
    """K = pi r_e n0 in cm^-2 (plasma frequency squared over 4c^2)."""
    return math.pi * R_E * n0


def density_from_constant(K):
    return K / (math.pi * R_E)
