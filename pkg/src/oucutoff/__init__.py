"""Numerics for abrupt convergence to equilibrium of Levy-driven
Ornstein-Uhlenbeck processes: characteristic-function machinery, total
variation distances, exact samplers, and cut-off schedule/profile
verification, including superposition and average-process variants.
"""

__version__ = "0.1.0"

from .models import (  # noqa: F401
    AtomLaw,
    AtomicMeasureJumps,
    CompoundPoissonJumps,
    ConditionReport,
    ExponentialLaw,
    IsotropicStableJumps,
    LevyModel,
    ParetoLaw,
    PowerLogTailLaw,
    StableJumps,
    StableParams,
    brownian_model,
    char_exponent,
    check_orey_masuda,
    check_small_jump_activity,
    has_log_moment,
    reciprocal_factorial_atoms,
    stable_model,
)
from .drift import (  # noqa: F401
    AsymptoticData,
    DriftSpectrum,
    asymptotic_decomposition,
    decay_constants,
    exp_action,
    oscillation_envelope,
    validate_mplus,
)
from .charfn import (  # noqa: F401
    CharFunctionGrid,
    DensityGrid,
    GeneratingTriple,
    build_cf_grid,
    cf_driftfree,
    cf_invariant,
    cf_transition,
    check_cf_tail_condition,
    density_from_cf,
    density_pair_from_cfs,
    driftfree_invariant_density,
    generating_triple,
    invert_to_density,
    smoothness_regime,
)
from .tv import (  # noqa: F401
    TvEstimate,
    tv_densities,
    tv_empirical,
    tv_identity_suite,
    tv_shift,
)
from .sampling import (  # noqa: F401
    RngStream,
    SampleBatch,
    empirical_cf,
    sample_invariant,
    sample_ou_exact,
    sample_ou_path,
    sample_stable,
)
from .cutoff import (  # noqa: F401
    CutoffSchedule,
    ProfileCurve,
    auxiliary_distance,
    check_invariance_property,
    cutoff_schedule,
    distance_curve,
    distance_value,
    error_term,
    oscillation_profile_band,
    profile_curve,
    profile_value,
    scaling_limit_ratio,
    scaling_limit_target,
    verify_cutoff,
)
from .ensembles import (  # noqa: F401
    AverageConfig,
    SuperpositionBlock,
    SuperpositionConfig,
    average_distance_mc,
    average_profile,
    average_schedule,
    superposition_limit_triple,
    superposition_profile,
    superposition_schedule,
    validate_superposition,
)
