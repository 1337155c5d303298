"""Matrix exponentials, analytic-semigroup bounds and energy identities on invariant subspaces."""

from .energy import (
    EnergyGram,
    EnergyReport,
    default_horizon,
    definiteness_from_energy,
    energy_gram,
    energy_identity,
    energy_lower_bound_check,
    indefinite_norm_derivative_check,
)
from .evolution import (
    SemigroupTrace,
    Trajectory,
    analytic_bounds,
    cauchy_evolve,
    expm_action,
    lyapunov_constant,
    semigroup_law_residual,
    spectral_abscissa,
)

__all__ = [
    "EnergyGram",
    "EnergyReport",
    "default_horizon",
    "definiteness_from_energy",
    "energy_gram",
    "energy_identity",
    "energy_lower_bound_check",
    "indefinite_norm_derivative_check",
    "SemigroupTrace",
    "Trajectory",
    "analytic_bounds",
    "cauchy_evolve",
    "expm_action",
    "lyapunov_constant",
    "semigroup_law_residual",
    "spectral_abscissa",
]
