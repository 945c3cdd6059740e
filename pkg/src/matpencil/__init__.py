"""Toolkit for rectangular matrix polynomials: ansatz-space pencils,
their reduction and trimming into strong linearizations, exact complete
eigenstructure, and backward-error experiments."""

from .errors import (MatPencilError, PreconditionError, SchemaError,
                     StructureError, VerificationError)
from .matpoly import (FIELD_FLOAT, FIELD_RATIONAL, MatPoly, Pencil,
                      build_structured, flip_r, h_dual, lambda_vec,
                      rect_identity, shear_s)
from .spaces import (SIDE_L1, SIDE_L2, AnsatzPencil, ansatz_membership,
                     build_l1, build_l2, companion_g1, companion_g2,
                     shifted_sum, space_dimension)
from .reduction import (TrimResult, full_z_rank, g_lin_witnesses,
                        kronecker_core, reflector_for, trim,
                        verify_witnesses, z_block, z_rank)
from .minimal import (MODE_GLIN_L1, MODE_GLIN_L2, MODE_TRIMMED_L1,
                      MODE_TRIMMED_L2, SIDE_LEFT, SIDE_RIGHT, MinimalBasis,
                      embed_right, lift_left, minimal_basis, project_ansatz,
                      recover_minimal, special_left_basis)
from .eigenstructure import (EigStructure, Verdict, check_g_linearization,
                             check_linearization, complete_eigenstructure,
                             index_sum_check, smith_form)
from .backward import (AppendixMatrices, PerturbReport, appendix_lambda_min,
                       backward_constants, dual_completion,
                       minimality_margin, optimality_check,
                       perturbed_polynomial, reports_to_jsonl,
                       run_experiment, sigma_min_tau, summarize_experiment)

__all__ = [
    "MatPencilError", "PreconditionError", "SchemaError", "StructureError",
    "VerificationError", "FIELD_FLOAT", "FIELD_RATIONAL", "MatPoly", "Pencil",
    "build_structured", "flip_r", "h_dual", "lambda_vec", "rect_identity",
    "shear_s", "SIDE_L1", "SIDE_L2", "AnsatzPencil", "ansatz_membership",
    "build_l1", "build_l2", "companion_g1", "companion_g2", "shifted_sum",
    "space_dimension", "TrimResult", "full_z_rank", "g_lin_witnesses",
    "kronecker_core", "reflector_for", "trim", "verify_witnesses", "z_block",
    "z_rank", "MODE_GLIN_L1", "MODE_GLIN_L2", "MODE_TRIMMED_L1",
    "MODE_TRIMMED_L2", "SIDE_LEFT", "SIDE_RIGHT", "MinimalBasis",
    "embed_right", "lift_left", "minimal_basis", "project_ansatz",
    "recover_minimal", "special_left_basis", "EigStructure", "Verdict",
    "check_g_linearization", "check_linearization",
    "complete_eigenstructure", "index_sum_check", "smith_form",
    "AppendixMatrices", "PerturbReport", "appendix_lambda_min",
    "backward_constants", "dual_completion", "minimality_margin",
    "optimality_check", "perturbed_polynomial", "reports_to_jsonl",
    "run_experiment", "sigma_min_tau", "summarize_experiment",
]
