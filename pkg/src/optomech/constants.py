"""Physical constants (CODATA 2018, SI units).

All core modules work at hbar = omega_m = 1; these constants enter only at
the boundary, when dimensionful couplings or sensitivities are restored.
"""

# Reduced Planck constant [J s]
HBAR = 1.054571817e-34

# Boltzmann constant [J/K] (exact)
K_B = 1.380649e-23

# Vacuum permittivity [F/m]
EPSILON_0 = 8.8541878128e-12

# Speed of light [m/s] (exact)
C_LIGHT = 299792458.0
