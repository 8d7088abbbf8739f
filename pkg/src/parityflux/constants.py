"""Unit conventions and physical constants.

All energies are stored as frequencies in GHz (E = h*f), temperatures in
kelvin, rates in 1/s.  This removes hbar bookkeeping: every device quantity
is quoted in these units.
"""

import scipy.constants as _sc

# k_B/h in GHz per kelvin; converts temperatures to energy-frequencies.
KB_GHZ_PER_K = _sc.k / _sc.h / 1e9  # = 20.836619...

# Planck constant, used only where an energy in joules is unavoidable
# (Cooper-pair counting against a per-joule density of states).
H_JS = _sc.h


def thermal_energy_ghz(t_kelvin):
    """k_B*T expressed in GHz."""
    return KB_GHZ_PER_K * t_kelvin
