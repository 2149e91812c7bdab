"""Neural mutual-information estimation: dual KL bounds, bias-corrected gradients,
and the training loop that turns a statistics network into an MI estimate.

Two objectives are supported. The Donsker-Varadhan bound

    dv = mean(T on joint pairs) - log(mean(exp(T) on decoupled pairs))

dominates the f-divergence bound

    f = mean(T on joint pairs) - mean(exp(T - 1) on decoupled pairs)

for every fixed network T, so dv training yields a tighter estimate. The dv
minibatch gradient is biased through its log-denominator; the corrected
gradient replaces the within-batch denominator with an exponential moving
average, which shrinks that bias at small learning rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .nn import (
    GradBuffer,
    MlpParams,
    NumericError,
    adam_init,
    adam_step,
    adaptive_clip,
    mlp_backward,
    mlp_forward_cached,
    mlp_init,
)
from .sampling import JointSampler, MarginalBatch, SampleBatch, marginal_resample, marginal_shuffle

OBJECTIVES = ("dv", "f")
MARGINAL_MODES = ("shuffle", "resample")


@dataclass(frozen=True)
class EmaState:
    """Running estimate of the marginal-batch mean of exp(T)."""

    value: float = 0.0
    initialized: bool = False


@dataclass
class TraceRecord:
    step: int
    objective: float
    ema: float | None
    grad_norm: float
    eval_estimate: float | None = None


@dataclass
class TrainingTrace:
    """Per-step history of a training run; step indices strictly increase."""

    records: list[TraceRecord] = field(default_factory=list)

    def eval_series(self) -> tuple[list[int], list[float]]:
        steps = [r.step for r in self.records if r.eval_estimate is not None]
        vals = [r.eval_estimate for r in self.records if r.eval_estimate is not None]
        return steps, vals


@dataclass
class MiEstimate:
    """A mutual-information estimate in nats, tagged with how it was produced."""

    nats: float
    method: str
    eval_points: int
    trace: TrainingTrace | None = None


@dataclass
class EstimatorConfig:
    """Everything a training run needs: objective, architecture, optimizer, protocol.

    eval_size defaults to 10x the batch size when left unset. The final
    estimate is the mean of the last `smoothing_window` evaluation values,
    each computed on a fresh eval set with its own rng streams.
    """

    objective: str = "dv"
    hidden: tuple[int, ...] = (100, 100)
    activation: str = "relu"
    batch_size: int = 256
    steps: int = 10000
    marginal_mode: str = "shuffle"
    ema_rate: float = 0.01
    use_ema_correction: bool = True
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    eval_size: int | None = None
    eval_every: int = 250
    smoothing_window: int = 10
    clip_cap: float | None = None
    seed: int = 0

    @property
    def resolved_eval_size(self) -> int:
        return self.eval_size if self.eval_size is not None else 10 * self.batch_size

    def validate(self) -> None:
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.marginal_mode not in MARGINAL_MODES:
            raise ValueError(f"marginal_mode must be one of {MARGINAL_MODES}, got {self.marginal_mode!r}")
        if self.batch_size < 2:
            raise ValueError("batch_size must be at least 2")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if not 0.0 < self.ema_rate <= 1.0:
            raise ValueError("ema_rate must lie in (0, 1]")
        if self.resolved_eval_size < self.batch_size:
            raise ValueError("eval_size must be at least batch_size")
        if self.eval_every < 1:
            raise ValueError("eval_every must be at least 1")
        if self.smoothing_window < 1:
            raise ValueError("smoothing_window must be at least 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.clip_cap is not None and self.clip_cap < 0:
            raise ValueError("clip_cap must be non-negative")
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise ValueError("hidden must be a non-empty list of positive widths")


def _check_vector(name: str, values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D vector")
    if not np.isfinite(v).all():
        raise NumericError(f"non-finite entries in {name}")
    return v


def logmeanexp(values) -> float:
    """log(mean(exp(values))) with a max shift, so entries up to ~700 stay finite."""
    v = _check_vector("values", values)
    m = float(v.max())
    return m + float(np.log(np.mean(np.exp(v - m))))


def dv_value(t_joint, t_marg) -> float:
    """Donsker-Varadhan bound in nats: mean(t_joint) - logmeanexp(t_marg).

    Invariant under a common constant shift of both inputs.
    """
    tj = _check_vector("t_joint", t_joint)
    tm = _check_vector("t_marg", t_marg)
    return float(tj.mean()) - logmeanexp(tm)


def f_value(t_joint, t_marg) -> float:
    """f-divergence bound in nats: mean(t_joint) - mean(exp(t_marg - 1)).

    Never exceeds dv_value on the same inputs; not shift invariant.
    """
    tj = _check_vector("t_joint", t_joint)
    tm = _check_vector("t_marg", t_marg)
    out = float(tj.mean()) - float(np.exp(tm - 1.0).mean())
    if not np.isfinite(out):
        raise NumericError("f-divergence bound overflowed")
    return out


def _softmax(values: np.ndarray) -> np.ndarray:
    w = np.exp(values - values.max())
    return w / w.sum()


def _bound_terms(params: MlpParams, joint: SampleBatch, marg: MarginalBatch):
    """Forward the network on both batches at once; returns inputs, cache, T values."""
    inputs_j = np.hstack([joint.x, joint.z])
    inputs_m = np.hstack([marg.x, marg.z_bar])
    stacked = np.vstack([inputs_j, inputs_m])
    t, cache = mlp_forward_cached(params, stacked)
    if not np.isfinite(t).all():
        raise NumericError("non-finite network output")
    return stacked, cache, t[: joint.size], t[joint.size:]


def _ascent_grad(params, stacked, cache, b: int, marg_cotangent: np.ndarray) -> GradBuffer:
    cot = np.concatenate([np.full(b, 1.0 / b), -marg_cotangent])
    return mlp_backward(params, stacked, cot, cache=cache)


def naive_gradient(params: MlpParams, joint: SampleBatch,
                   marg: MarginalBatch) -> tuple[GradBuffer, float]:
    """Minibatch ascent gradient of the dv bound, denominator taken within the batch.

    The joint term backpropagates a uniform 1/b cotangent; the marginal term
    backpropagates softmax weights exp(T_i)/sum_j exp(T_j). The within-batch
    denominator is what makes this estimate of the population gradient biased.
    """
    stacked, cache, t_joint, t_marg = _bound_terms(params, joint, marg)
    value = dv_value(t_joint, t_marg)
    grad = _ascent_grad(params, stacked, cache, joint.size, _softmax(t_marg))
    return grad, value


def corrected_gradient(params: MlpParams, joint: SampleBatch, marg: MarginalBatch,
                       ema: EmaState) -> tuple[GradBuffer, float]:
    """Ascent gradient of the dv bound with the denominator held at the EMA value.

    Identical joint term as naive_gradient; the marginal cotangent becomes
    exp(T_i) / (m * ema.value), i.e. the gradient of
    mean(T_joint) - mean(exp(T_marg)) / C with C frozen at the EMA.
    """
    if not ema.initialized:
        raise ValueError("EMA state must be initialized before use")
    stacked, cache, t_joint, t_marg = _bound_terms(params, joint, marg)
    value = dv_value(t_joint, t_marg)
    w = np.exp(t_marg) / (t_marg.size * ema.value)
    if not np.isfinite(w).all():
        raise NumericError("overflow in corrected marginal weights")
    grad = _ascent_grad(params, stacked, cache, joint.size, w)
    return grad, value


def f_gradient(params: MlpParams, joint: SampleBatch,
               marg: MarginalBatch) -> tuple[GradBuffer, float]:
    """Exact minibatch ascent gradient of the f bound (unbiased, no correction needed)."""
    stacked, cache, t_joint, t_marg = _bound_terms(params, joint, marg)
    value = f_value(t_joint, t_marg)
    w = np.exp(t_marg - 1.0) / t_marg.size
    if not np.isfinite(w).all():
        raise NumericError("overflow in f-bound marginal weights")
    grad = _ascent_grad(params, stacked, cache, joint.size, w)
    return grad, value


def ema_update(state: EmaState, batch_mean_exp: float, alpha: float) -> EmaState:
    """Fold one batch's mean(exp(T)) into the running denominator estimate.

    An uninitialized state adopts the batch value outright; alpha=1 always
    tracks the latest batch.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not np.isfinite(batch_mean_exp) or batch_mean_exp <= 0.0:
        raise NumericError("EMA input must be positive and finite")
    if not state.initialized:
        return EmaState(value=float(batch_mean_exp), initialized=True)
    return EmaState(value=(1.0 - alpha) * state.value + alpha * float(batch_mean_exp),
                    initialized=True)


def evaluate_bound(params: MlpParams, eval_batch: SampleBatch, objective: str = "dv",
                   marginal_mode: str = "shuffle", rng: np.random.Generator | None = None) -> float:
    """Score a fixed network on an evaluation batch.

    The marginal pairing is built from the batch itself: a uniform permutation
    of the z rows for "shuffle", an independent with-replacement redraw of the
    z rows for "resample". Deterministic for a given rng state; all reductions
    are numpy's fixed-order (pairwise) sums, so the value is reproducible
    bit for bit.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if eval_batch.size < 2:
        raise ValueError("evaluation batch needs at least 2 rows")
    if rng is None:
        rng = np.random.default_rng(0)
    if marginal_mode == "shuffle":
        marg = marginal_shuffle(eval_batch, rng)
    elif marginal_mode == "resample":
        idx = rng.integers(0, eval_batch.size, size=eval_batch.size)
        marg = MarginalBatch(x=eval_batch.x, z_bar=eval_batch.z[idx])
    else:
        raise ValueError(f"marginal_mode must be one of {MARGINAL_MODES}")
    _, _, t_joint, t_marg = _bound_terms(params, eval_batch, marg)
    if objective == "dv":
        return dv_value(t_joint, t_marg)
    return f_value(t_joint, t_marg)


def _seed_from(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


def train_mine(config: EstimatorConfig, joint_sampler: JointSampler) -> MiEstimate:
    """Run the full estimation loop and return the smoothed final estimate.

    Per step: draw a joint batch, build a marginal batch per the configured
    mode, take an Adam ascent step along the objective gradient (EMA-corrected
    for dv when enabled, the exact f gradient otherwise), optionally clipped.
    Every eval_every steps (and at the final step) the bound is evaluated on a
    fresh eval_size batch with dedicated rng streams; the estimate is the mean
    of the last smoothing_window evaluations.

    Raises NumericError with the offending step index if the objective or
    gradient ever goes non-finite.
    """
    config.validate()
    ss = np.random.SeedSequence(config.seed)
    s_init, s_data, s_shuffle, s_eval_data, s_eval_shuffle, s_probe = ss.spawn(6)

    probe = joint_sampler(1, np.random.default_rng(s_probe))
    input_dim = probe.x.shape[1] + probe.z.shape[1]
    params = mlp_init(input_dim, config.hidden, config.activation, seed=_seed_from(s_init))
    opt = adam_init(params, lr=config.lr, beta1=config.beta1, beta2=config.beta2,
                    eps=config.adam_eps)

    data_rng = np.random.default_rng(s_data)
    shuffle_rng = np.random.default_rng(s_shuffle)
    eval_data_rng = np.random.default_rng(s_eval_data)
    eval_shuffle_rng = np.random.default_rng(s_eval_shuffle)

    use_dv = config.objective == "dv"
    ema = EmaState()
    trace = TrainingTrace()
    eval_values: list[float] = []

    for step in range(1, config.steps + 1):
        joint = joint_sampler(config.batch_size, data_rng)
        if config.marginal_mode == "shuffle":
            marg = marginal_shuffle(joint, shuffle_rng)
        else:
            marg = marginal_resample(joint_sampler, config.batch_size, data_rng)

        try:
            if use_dv and config.use_ema_correction:
                stacked, cache, t_joint, t_marg = _bound_terms(params, joint, marg)
                batch_mean_exp = float(np.exp(t_marg).mean())
                ema = ema_update(ema, batch_mean_exp, config.ema_rate)
                value = dv_value(t_joint, t_marg)
                w = np.exp(t_marg) / (t_marg.size * ema.value)
                grad = _ascent_grad(params, stacked, cache, joint.size, w)
            elif use_dv:
                grad, value = naive_gradient(params, joint, marg)
            else:
                grad, value = f_gradient(params, joint, marg)

            if config.clip_cap is not None:
                grad = adaptive_clip(grad, config.clip_cap)
            adam_step(opt, params, grad, ascent=True)
        except NumericError as exc:
            raise NumericError(f"{exc} (training step {step})", step=step) from exc

        record = TraceRecord(step=step, objective=value,
                             ema=ema.value if ema.initialized else None,
                             grad_norm=grad.norm())
        if step % config.eval_every == 0 or step == config.steps:
            try:
                eval_batch = joint_sampler(config.resolved_eval_size, eval_data_rng)
                est = evaluate_bound(params, eval_batch, config.objective, "shuffle",
                                     eval_shuffle_rng)
            except NumericError as exc:
                raise NumericError(f"{exc} (training step {step})", step=step) from exc
            eval_values.append(est)
            record.eval_estimate = est
        trace.records.append(record)

    window = min(config.smoothing_window, len(eval_values))
    final = float(np.mean(eval_values[-window:]))
    method = "mine_dv" if use_dv else "mine_f"
    return MiEstimate(nats=final, method=method, eval_points=config.resolved_eval_size,
                      trace=trace)
