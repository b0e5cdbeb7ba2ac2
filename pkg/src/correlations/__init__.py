"""Pairwise correlation measures: X states, collective reduction, closed forms."""

from .reduction import (
    PairwiseElements,
    collective_expectations,
    pairwise_elements,
    reduce_pairwise,
    scaled_concurrence,
    wootters_scaled_concurrence,
)
from .thermo import (
    dicke_energy_per_atom,
    lmg_energy_per_atom,
    locate_thermo_maximum,
    mean_field,
    mean_field_dicke,
    mean_field_lmg,
    stationarity_residuals,
    thermo_classical,
    thermo_correlations,
    thermo_discord,
    thermo_elements,
    thermo_m,
    thermo_mutual_info,
)
from .xstate import (
    concurrence_wootters,
    conditional_entropy,
    entropy_joint,
    entropy_subsystem,
    joint_eigenvalues,
    minimize_conditional_entropy,
    quantum_discord,
)

__all__ = [
    "PairwiseElements",
    "collective_expectations",
    "concurrence_wootters",
    "conditional_entropy",
    "dicke_energy_per_atom",
    "entropy_joint",
    "entropy_subsystem",
    "joint_eigenvalues",
    "lmg_energy_per_atom",
    "locate_thermo_maximum",
    "mean_field",
    "mean_field_dicke",
    "mean_field_lmg",
    "minimize_conditional_entropy",
    "pairwise_elements",
    "quantum_discord",
    "reduce_pairwise",
    "scaled_concurrence",
    "stationarity_residuals",
    "thermo_classical",
    "thermo_correlations",
    "thermo_discord",
    "thermo_elements",
    "thermo_m",
    "thermo_mutual_info",
    "wootters_scaled_concurrence",
]
