"""Exact truncated vertex operator algebras and their smeared fields."""

__version__ = "0.1.0"

from .algebras import MatrixAlgebra, commutant, generate_algebra, net_report
from .axioms import (
    adjoint_modes,
    gram_spectrum_scan,
    locality_test,
    unitarity_test,
    vacuum_translation_grading_check,
    virasoro_bracket_check,
)
from .fields import FieldModeTable, ModeIndex, mode_of, reconstruct_field, sugawara_vector
from .graded import GradedOperator, GradedVector, GramForm, IndefiniteGram, OutOfWindow, SingularGram, TruncationWindow, operator_norm
from .linalg import exact_inverse, ldl_definiteness
from .models import HeisenbergModel, ModelSpec, TensorModel, VirasoroModel, build_model, tensor_lift
from .scalar import Scalar, format_scalar, parse_scalar
from .smearing import Arc, Bump, TrigPoly, commutator_decay, energy_bound_estimate, smear

__all__ = [
    "Arc", "Bump", "FieldModeTable", "GradedOperator", "GradedVector", "GramForm",
    "HeisenbergModel", "IndefiniteGram", "MatrixAlgebra", "ModeIndex", "ModelSpec", "OutOfWindow", "Scalar",
    "SingularGram", "TensorModel", "TrigPoly", "TruncationWindow", "VirasoroModel",
    "adjoint_modes", "build_model", "commutant", "commutator_decay", "energy_bound_estimate",
    "exact_inverse", "format_scalar", "generate_algebra", "gram_spectrum_scan",
    "ldl_definiteness", "locality_test", "mode_of", "net_report", "operator_norm",
    "parse_scalar", "reconstruct_field", "smear", "sugawara_vector", "tensor_lift",
    "unitarity_test", "vacuum_translation_grading_check", "virasoro_bracket_check",
]
