"""Exact combinatorics of quantum toric geometry.

Quantum fans over q-lattices, calibrations, morphism checking, chart and
gluing data, Gale transforms, LVMB data and moduli-space deciders, all in
exact arithmetic over the fraction field of polynomials in declared real
parameters.
"""

from .calibration import (CalibratedFan, Calibration, induced_fan,
                          kernel_rank, standardize_calibration,
                          trivial_calibration)
from .lattice_fan import (CombType, QLattice, QuantumFan, comb_equivalent,
                          comb_type, d_realizable, fan_from_max_cones,
                          fan_properties, gamma_contains, gamma_rank,
                          standardize_fan, validate_fan)
from .linalg import Matrix, hnf, kernel_basis, mat_inverse
from .scalars import Parameter, Scalar, Sign, Witness, sign_at

__all__ = [
    "CalibratedFan", "Calibration", "CombType", "Matrix", "Parameter",
    "QLattice", "QuantumFan", "Scalar", "Sign", "Witness",
    "comb_equivalent", "comb_type", "d_realizable", "fan_from_max_cones",
    "fan_properties", "gamma_contains", "gamma_rank", "hnf", "induced_fan",
    "kernel_basis", "kernel_rank", "mat_inverse", "sign_at",
    "standardize_calibration", "standardize_fan", "trivial_calibration",
    "validate_fan",
]

__version__ = "0.1.0"
