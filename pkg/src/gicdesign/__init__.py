"""Model-order selection with designed information-criterion penalties.

The package covers the generalized information criterion (GIC) family
total(k) = -2 log-likelihood(k) + phi(k) * nu, two concrete problems
(source enumeration from sample-covariance eigenvalues, and order selection
in the general linear model), closed-form and moment-model routes to the
probability of overestimation, and designers that pick the penalty weight
nu capping that probability at a target.
"""

from .criteria import (
    LikelihoodProfile,
    PenaltyRule,
    SelectionResult,
    resolve_nu,
    select_order,
)
from .glm import (
    GlmDesignResult,
    GlmScenario,
    build_sinusoid_scenario,
    design_nu_glm,
    estimate_order_glm,
    pover_bounds,
    prob_over_term,
    residual_variance,
    synth_sinusoids,
)
from .simulate import (
    SweepConfig,
    SweepRecord,
    overlay_analytics,
    run_sweep,
    sweep_selections,
    summarize_selections,
    write_sweep_csv,
)
from .source_enum import (
    DesignError,
    EnumDesignResult,
    design_nu_enum,
    enum_free_params,
    estimate_num_signals,
    overest_threshold,
    pover_highsnr,
    ratio_root,
    scm_eigenvalues,
    wk_minus2loglik,
)
from .wishart import (
    MomentFitError,
    MomentTriple,
    ShiftedGamma,
    WishartSpec,
    fit_shifted_gamma,
    lmax_moments_asymptotic,
    lmax_moments_mc,
    sample_u,
    trace_moment,
    u_model,
    u_moments,
)

__version__ = "0.1.0"

__all__ = [
    "PenaltyRule",
    "LikelihoodProfile",
    "SelectionResult",
    "resolve_nu",
    "select_order",
    "WishartSpec",
    "MomentTriple",
    "ShiftedGamma",
    "MomentFitError",
    "trace_moment",
    "lmax_moments_mc",
    "lmax_moments_asymptotic",
    "u_moments",
    "fit_shifted_gamma",
    "u_model",
    "sample_u",
    "DesignError",
    "EnumDesignResult",
    "scm_eigenvalues",
    "wk_minus2loglik",
    "enum_free_params",
    "estimate_num_signals",
    "overest_threshold",
    "ratio_root",
    "pover_highsnr",
    "design_nu_enum",
    "GlmScenario",
    "GlmDesignResult",
    "build_sinusoid_scenario",
    "synth_sinusoids",
    "residual_variance",
    "estimate_order_glm",
    "prob_over_term",
    "pover_bounds",
    "design_nu_glm",
    "SweepConfig",
    "SweepRecord",
    "run_sweep",
    "sweep_selections",
    "summarize_selections",
    "overlay_analytics",
    "write_sweep_csv",
    "__version__",
]
