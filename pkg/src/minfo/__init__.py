"""Mutual-information estimation toolkit.

Neural estimation on a self-contained MLP core (dual KL bounds with
bias-corrected training), a Kraskov k-NN baseline, closed-form Gaussian
ground truth, a sample-complexity calculator, and a deterministic CLI
experiment harness.
"""

from .baselines import KsgConfig, digamma, gaussian_mi_analytic, ksg_estimate
from .estimator import (
    EmaState,
    EstimatorConfig,
    MiEstimate,
    TrainingTrace,
    corrected_gradient,
    dv_value,
    ema_update,
    evaluate_bound,
    f_gradient,
    f_value,
    logmeanexp,
    naive_gradient,
    train_mine,
)
from .nn import (
    AdamState,
    GradBuffer,
    GradCheckReport,
    MlpParams,
    NumericError,
    adam_init,
    adam_step,
    adaptive_clip,
    grad_check,
    mlp_backward,
    mlp_forward,
    mlp_init,
)
from .sampling import (
    GaussianSpec,
    MarginalBatch,
    NonlinearSpec,
    SampleBatch,
    gen_gaussian,
    gen_nonlinear,
    make_rng,
    make_sampler,
    marginal_resample,
    marginal_shuffle,
)
from .theory import ComplexityInputs, DominanceReport, dv_dominates_f_check, sample_complexity

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ComplexityInputs",
    "DominanceReport",
    "EmaState",
    "EstimatorConfig",
    "GaussianSpec",
    "GradBuffer",
    "GradCheckReport",
    "KsgConfig",
    "MarginalBatch",
    "MiEstimate",
    "MlpParams",
    "NonlinearSpec",
    "NumericError",
    "SampleBatch",
    "TrainingTrace",
    "adam_init",
    "adam_step",
    "adaptive_clip",
    "corrected_gradient",
    "digamma",
    "dv_dominates_f_check",
    "dv_value",
    "ema_update",
    "evaluate_bound",
    "f_gradient",
    "f_value",
    "gaussian_mi_analytic",
    "gen_gaussian",
    "gen_nonlinear",
    "grad_check",
    "ksg_estimate",
    "logmeanexp",
    "make_rng",
    "make_sampler",
    "marginal_resample",
    "marginal_shuffle",
    "mlp_backward",
    "mlp_forward",
    "mlp_init",
    "naive_gradient",
    "sample_complexity",
    "train_mine",
]
