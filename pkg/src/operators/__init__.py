"""Stokes operator, trilinear form, convection map and its truncation"""

from .forms import stokes_apply, trilinear_b, B_op, B_diag, convection_coeffs, dealiased_grid
from .truncation import CutoffSpec, truncated_Bn, truncated_coeffs, smoothstep
from .audit import (
    OperatorAudit,
    LipschitzBands,
    lipschitz_audit_B,
    estimate_B_extension_constant,
    truncated_lipschitz_ratios,
    fit_and_validate,
    random_ball_field,
    cancellation_audit,
)

__all__ = [
    'stokes_apply', 'trilinear_b', 'B_op', 'B_diag', 'convection_coeffs', 'dealiased_grid',
    'CutoffSpec', 'truncated_Bn', 'truncated_coeffs', 'smoothstep',
    'OperatorAudit', 'LipschitzBands', 'lipschitz_audit_B', 'estimate_B_extension_constant',
    'truncated_lipschitz_ratios', 'fit_and_validate', 'random_ball_field', 'cancellation_audit',
]
