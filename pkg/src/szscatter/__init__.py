"""One-dimensional scattering through the Bogolubov-coefficient (a, b) system.

Exact catalog, ODE engine, rigorous bounds on T and R, first-order beta
estimates and the parametric-oscillator mirror.
"""

from .approximations import above_barrier_beta, born_beta, distorted_born_beta
from .bounds import BoundReport, Family, admissible_bounds, case1_bound, case2_bound, \
    general_bound, multi_extrema_bound
from .engine import (BogolubovState, PhaseVariant, ScatteringResult, Tolerances,
                     TransferMatrix, full_line_matrix, integrate, reconstruct_wavefunction,
                     transfer_matrix)
from .errors import ScatteringError
from .parametric import FrequencyProfile, evolve, parametric_bounds, to_scattering
from .potentials import (DEFAULT_UNITS, DeltaSpike, Potential, UnitsConfig,
                         asymptotic_wavenumbers, find_extrema, gaussian_sum_potential,
                         l1_shifted_norm, wavenumber)

__all__ = [
    "BogolubovState", "BoundReport", "DEFAULT_UNITS", "DeltaSpike", "Family",
    "FrequencyProfile", "PhaseVariant", "Potential", "ScatteringError", "ScatteringResult",
    "Tolerances", "TransferMatrix", "UnitsConfig", "above_barrier_beta", "admissible_bounds",
    "asymptotic_wavenumbers", "born_beta", "case1_bound", "case2_bound",
    "distorted_born_beta", "evolve", "find_extrema", "full_line_matrix",
    "gaussian_sum_potential", "general_bound", "integrate", "l1_shifted_norm",
    "multi_extrema_bound", "parametric_bounds", "reconstruct_wavefunction", "to_scattering",
    "transfer_matrix", "wavenumber",
]
