from .base import (KIND_NAMES, KIND_X, KIND_Y, KIND_Z, MIXED, X_TYPE, Z_TYPE,
                   ContractViolation, Geometry, InvalidSize, ResidualClass,
                   StabilizerCode, checks_commute, class_bits, classify_residual,
                   code_distance_bruteforce, encoded_qubits, logical_algebra_ok,
                   syndrome, translation_covariant, violated)
from .catalog import (ClassicalSpinModel, build_code, build_cubic_code,
                      build_four_qubit_toric, build_ising_2d, build_toric_2d,
                      build_toric_4d, cubic_allowed, toric_qubit)

__all__ = [
    "KIND_NAMES", "KIND_X", "KIND_Y", "KIND_Z", "MIXED", "X_TYPE", "Z_TYPE",
    "ContractViolation", "Geometry", "InvalidSize", "ResidualClass", "StabilizerCode",
    "checks_commute", "class_bits", "classify_residual", "code_distance_bruteforce",
    "encoded_qubits", "logical_algebra_ok", "syndrome", "translation_covariant", "violated",
    "ClassicalSpinModel", "build_code", "build_cubic_code", "build_four_qubit_toric",
    "build_ising_2d", "build_toric_2d", "build_toric_4d", "cubic_allowed", "toric_qubit",
]
