"""Physical constants used across the package.

All frequencies are in MHz and all times in microseconds unless a name says
otherwise. Magnetic fields are in tesla. The electron Zeeman term enters as
+g (mu_B/h) B0 Sz per electron and the nuclear term as +gamma_n B0 Iz per
nucleus; with the spin operators defined as sigma/2 and "up" the first basis
state, spin-up lies above spin-down for both species under these signs.
"""

from scipy.constants import physical_constants

#: Bohr magneton over Planck constant, MHz per tesla.
MU_B_OVER_H_MHZ_PER_T: float = (
    physical_constants["Bohr magneton in Hz/T"][0] / 1e6
)

#: Default donor-bound electron g-factor in silicon.
G_FACTOR_DEFAULT: float = 1.9985

#: 31P nuclear gyromagnetic ratio, MHz per tesla.
GAMMA_N_MHZ_PER_T: float = 17.23

#: Default hyperfine coupling per donor, MHz.
HYPERFINE_DEFAULT_MHZ: float = 112.0

#: Default exchange coupling, MHz.
EXCHANGE_DEFAULT_MHZ: float = 12.0

#: Default static field, tesla.
B0_DEFAULT_T: float = 1.0
