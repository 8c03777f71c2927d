"""carnotineq: Carnot-group arithmetic and weighted-inequality verification."""

from .closedforms import (
    Lemma44Params,
    beta,
    lemma44_closed_form,
    lemma44_oracle,
    sphere_surface,
    unit_ball_volume,
)
from .errors import (
    BadEpsilon,
    BadTau,
    CarnotError,
    DegenerateSampler,
    DomainError,
    InadmissibleParams,
    InvalidGroupSpec,
    InvalidScale,
    NonFiniteSample,
    NonIntegrableWeight,
    SingularEvaluationPoint,
    UnsupportedStep,
    ZeroNorm,
)
from .groups import (
    GroupSpec,
    Point,
    builtin_group,
    dilate,
    euclidean,
    free_step_two,
    group_from_arg,
    heisenberg,
    homogeneous_norm,
    inverse,
    load_group_spec,
    multiply,
    pseudo_distance,
    validate_group_spec,
)
from .operators import (
    AnisoBump,
    BallIndicator,
    KernelParams,
    Tabulated,
    TrialFunction,
    bilinear_form,
    eval_S,
    eval_T,
    load_tabulated,
    stein_weiss_ratio,
    trial_from_dict,
)
from .sampling import (
    BallSpec,
    IntegralEstimate,
    SamplerConfig,
    UNWEIGHTED,
    WeightSpec,
    doubling_ratio,
    haar_scaling_check,
    mc_integrate,
    sample_ball,
    weighted_lp_norm,
)
from .verify import (
    AdmissibilityReport,
    BestConstantResult,
    ExponentParams,
    SearchConfig,
    SWConditionReport,
    check_admissible,
    check_condition_35,
    check_condition_36,
    duality_check,
    estimate_best_constant,
    estimate_triangle_constant,
    phi_of_ball,
    sw_conditions,
    triangle_constant,
)

__version__ = "0.1.0"
