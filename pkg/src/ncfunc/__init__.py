"""Free noncommutative function calculus over d-tuples of complex matrices."""

from .core import (
    DEFAULT_TOL,
    InputError,
    IntertwinerCertificate,
    Point,
    ResourceError,
    bidiagonal_block,
    certify_intertwiner,
    direct_sum,
    row_norm,
    spectral_norm,
    upper_block,
)
from .report import CheckReport
from .series import (
    DivergenceWarning,
    FreeSeries,
    closed_form,
    directional_derivative,
    evaluate,
    luminet,
    luminet_term,
    multiply,
    radius,
)
from .taylor import (
    MatricialFunction,
    MatricialMap,
    MatricialityWarning,
    delta1,
    delta_n,
    remainder_check,
    taylor_coeffs,
    taylor_expand,
)
from .mobius import CentralVector, dg_gamma_matrix, g_gamma, g_series_partial

__all__ = [
    "DEFAULT_TOL",
    "CentralVector",
    "CheckReport",
    "DivergenceWarning",
    "FreeSeries",
    "InputError",
    "IntertwinerCertificate",
    "MatricialFunction",
    "MatricialMap",
    "MatricialityWarning",
    "Point",
    "ResourceError",
    "bidiagonal_block",
    "certify_intertwiner",
    "closed_form",
    "delta1",
    "delta_n",
    "dg_gamma_matrix",
    "direct_sum",
    "directional_derivative",
    "evaluate",
    "g_gamma",
    "g_series_partial",
    "luminet",
    "luminet_term",
    "multiply",
    "radius",
    "remainder_check",
    "row_norm",
    "spectral_norm",
    "taylor_coeffs",
    "taylor_expand",
    "upper_block",
]
