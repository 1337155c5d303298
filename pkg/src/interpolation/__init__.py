"""K-functionals, interpolation norms and Sobolev-tower identities for Hilbert couples."""

from .couples import (
    HilbertCouple,
    InterpolationResult,
    geometric_mean,
    sobolev_tower_gram,
    tower_couple,
    weighted_mean,
)
from .identities import (
    check_identity,
    equivalence_constants,
    f_scale_identity,
    shifted_form_identity_check,
    norm_independence,
    reiteration_constants,
    shifted_negative_norm_constants,
    tower_identity,
)
from .k_functional import interp_half_norm, interp_theta_norm, k_exact, k_quadratic

__all__ = [
    "HilbertCouple",
    "InterpolationResult",
    "geometric_mean",
    "sobolev_tower_gram",
    "tower_couple",
    "weighted_mean",
    "check_identity",
    "equivalence_constants",
    "f_scale_identity",
    "shifted_form_identity_check",
    "norm_independence",
    "reiteration_constants",
    "shifted_negative_norm_constants",
    "tower_identity",
    "interp_half_norm",
    "interp_theta_norm",
    "k_exact",
    "k_quadratic",
]
