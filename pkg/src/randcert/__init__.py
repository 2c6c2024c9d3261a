"""randcert: certified randomness bounds from an energy-time constraint.

Library + CLI computing rigorous lower bounds on the extractable randomness
(conditional entropy of the outcome) of a timed prepare-and-measure
experiment whose only physical assumption is an upper bound E on the energy
uncertainty of the prepared state and a known trigger delay dt.
"""

from .sets import (
    HALF_PI,
    BoundaryCurve,
    Correlation,
    EnergyTimeBudget,
    InfeasibleInputError,
    boundary_point,
    classical_contains,
    classical_wedge_width,
    entropy_H,
    gamma,
    h_bin,
    quantum_contains,
    quantum_overlap_lhs,
)
from .dual import (
    CertifiedBound,
    DiscretizationParams,
    DualVector,
    SweepResult,
    SymmetryMap,
    canonicalize,
    certify,
    delta_correction,
    diagonal_sweep,
    dual_value,
    inner_min,
    set_threads,
    t_grid,
)
from .oracle import (
    Ensemble,
    TwoLevelModel,
    best_feasible_ensemble,
    ensemble_feasible,
    primal_upper_bound,
    stddev_concavity_check,
    two_level_probabilities,
)
from .coherent import (
    CoherentPoint,
    coherent_certify,
    coherent_correlations,
    correlation_at_phase,
    erf,
    nonzero_randomness_condition,
    region_mask,
)

__version__ = "0.1.0"

__all__ = [
    "HALF_PI",
    "BoundaryCurve",
    "Correlation",
    "EnergyTimeBudget",
    "InfeasibleInputError",
    "boundary_point",
    "classical_contains",
    "classical_wedge_width",
    "entropy_H",
    "gamma",
    "h_bin",
    "quantum_contains",
    "quantum_overlap_lhs",
    "CertifiedBound",
    "DiscretizationParams",
    "DualVector",
    "SweepResult",
    "SymmetryMap",
    "canonicalize",
    "certify",
    "delta_correction",
    "diagonal_sweep",
    "dual_value",
    "inner_min",
    "set_threads",
    "t_grid",
    "Ensemble",
    "TwoLevelModel",
    "best_feasible_ensemble",
    "ensemble_feasible",
    "primal_upper_bound",
    "stddev_concavity_check",
    "two_level_probabilities",
    "CoherentPoint",
    "coherent_certify",
    "coherent_correlations",
    "correlation_at_phase",
    "erf",
    "nonzero_randomness_condition",
    "region_mask",
    "__version__",
]
