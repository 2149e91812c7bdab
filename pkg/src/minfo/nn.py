"""Scalar-output MLP with explicit backpropagation, Adam, and gradient utilities.

Everything is dense float64 numpy. The network maps each row of a
(batch, input_dim) matrix to one scalar; gradients are accumulated in
reverse through the affine/activation chain exactly, so they can be
validated against central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ACTIVATIONS = ("relu", "elu")


class NumericError(ArithmeticError):
    """A computation produced or received non-finite values."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass
class MlpParams:
    """Layered weights and biases of a scalar-output network.

    ``weights[i]`` has shape (out_i, in_i) and ``biases[i]`` shape (out_i,).
    Layer widths must chain and the final layer has exactly one output unit.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}, expected one of {ACTIVATIONS}")
        if not self.weights or len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must be non-empty parallel lists")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValueError(f"layer {i}: weight shape {w.shape} and bias shape {b.shape} disagree")
            if i > 0 and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f"layer {i}: input width {w.shape[1]} does not chain with previous layer")
        if self.weights[-1].shape[0] != 1:
            raise ValueError("final layer must have exactly one output unit")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def param_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass
class GradBuffer:
    """Per-parameter partial derivatives, shape-congruent with an MlpParams."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def arrays(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def norm(self) -> float:
        """Frobenius norm over every entry, weights and biases together."""
        return math.sqrt(sum(float(np.sum(a * a)) for a in self.arrays()))

    def scaled(self, factor: float) -> "GradBuffer":
        return GradBuffer([w * factor for w in self.weights],
                          [b * factor for b in self.biases])


def grad_zeros(params: MlpParams) -> GradBuffer:
    return GradBuffer([np.zeros_like(w) for w in params.weights],
                      [np.zeros_like(b) for b in params.biases])


def _check_congruent(params: MlpParams, grads: GradBuffer) -> None:
    if len(grads.weights) != len(params.weights) or len(grads.biases) != len(params.biases):
        raise ValueError("gradient buffer has a different number of layers than the network")
    for p, g in zip(params.weights + params.biases, grads.arrays()):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter shape {p.shape}")


def mlp_init(input_dim: int, hidden: Sequence[int], activation: str = "relu",
             seed: int = 0) -> MlpParams:
    """Build a scalar-output MLP, deterministically for a fixed seed.

    Weights are Xavier-uniform, drawn from
    uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))) layer by
    layer; all biases start at exactly zero.
    """
    if input_dim < 1:
        raise ValueError("input_dim must be at least 1")
    hidden = [int(h) for h in hidden]
    if not hidden:
        raise ValueError("at least one hidden layer is required")
    if any(h < 1 for h in hidden):
        raise ValueError("zero-width hidden layer")
    rng = np.random.default_rng(seed)
    dims = [int(input_dim), *hidden, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases, activation)


def _activate(name: str, pre: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(pre, 0.0)
    return np.where(pre > 0.0, pre, np.expm1(pre))


def _activate_deriv(name: str, pre: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (pre > 0.0).astype(np.float64)
    return np.where(pre > 0.0, 1.0, np.exp(pre))


def _check_inputs(params: MlpParams, inputs) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != params.input_dim:
        raise ValueError(f"expected inputs of shape (b, {params.input_dim}), got {inputs.shape}")
    return inputs


def mlp_forward_cached(params: MlpParams, inputs: np.ndarray):
    """Forward pass keeping per-layer activations and pre-activations.

    Returns (values, cache) where values has shape (b,) and cache can be fed
    to mlp_backward to skip recomputing the forward pass.
    """
    inputs = _check_inputs(params, inputs)
    acts = [inputs]
    pres = []
    h = inputs
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        pre = h @ w.T + b
        pres.append(pre)
        h = _activate(params.activation, pre)
        acts.append(h)
    out = h @ params.weights[-1].T + params.biases[-1]
    return out[:, 0], (acts, pres)


def mlp_forward(params: MlpParams, inputs) -> np.ndarray:
    """Evaluate the network on each input row; pure function of (params, inputs)."""
    out, _ = mlp_forward_cached(params, np.asarray(inputs, dtype=np.float64))
    if not np.isfinite(out).all():
        raise NumericError("non-finite network output")
    return out


def mlp_backward(params: MlpParams, inputs, output_cotangent, cache=None) -> GradBuffer:
    """Gradient of sum_i cotangent_i * T(row_i) with respect to every parameter.

    Exact reverse accumulation; linear in the cotangent. Pass the cache from
    mlp_forward_cached to avoid recomputing the forward pass.
    """
    inputs = _check_inputs(params, inputs)
    cot = np.asarray(output_cotangent, dtype=np.float64)
    if cot.shape != (inputs.shape[0],):
        raise ValueError(f"cotangent shape {cot.shape} does not match batch size {inputs.shape[0]}")
    if cache is None:
        _, cache = mlp_forward_cached(params, inputs)
    acts, pres = cache
    n_layers = len(params.weights)
    g_w: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    g_b: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    delta = cot[:, None]
    for i in range(n_layers - 1, -1, -1):
        g_w[i] = delta.T @ acts[i]
        g_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i]) * _activate_deriv(params.activation, pres[i - 1])
    return GradBuffer(g_w, g_b)


@dataclass
class GradCheckReport:
    max_rel_err: float
    passed: bool
    skipped_kinks: int = 0


def grad_check(params: MlpParams, inputs, tol: float = 1e-4, step: float = 1e-5,
               grads: GradBuffer | None = None) -> GradCheckReport:
    """Compare analytic gradients to central finite differences on every parameter.

    The objective is sum_i T(row_i). Relative error is measured against
    max(1, |analytic|, |numeric|) so exact-zero gradients (e.g. dead relu
    paths) are held to an absolute tolerance instead of 0/0.

    For relu networks, a perturbation that flips some unit's activation region
    puts the central difference across the kink, where it is not a valid
    derivative oracle (it reports the two-sided average slope); such entries
    are skipped and counted in skipped_kinks. A candidate GradBuffer can be
    supplied in place of the freshly computed one.
    """
    inputs = _check_inputs(params, inputs)
    if inputs.shape[0] < 1:
        raise ValueError("inputs must contain at least one row")
    if grads is None:
        grads = mlp_backward(params, inputs, np.ones(inputs.shape[0]))
    _check_congruent(params, grads)
    guard_kinks = params.activation == "relu"

    def objective():
        out, (_, pres) = mlp_forward_cached(params, inputs)
        pattern = [pre > 0.0 for pre in pres] if guard_kinks else None
        return float(out.sum()), pattern

    max_rel = 0.0
    skipped = 0
    for p_arr, g_arr in zip(params.weights + params.biases, grads.arrays()):
        for j in range(p_arr.size):
            orig = p_arr.flat[j]
            p_arr.flat[j] = orig + step
            f_plus, pat_plus = objective()
            p_arr.flat[j] = orig - step
            f_minus, pat_minus = objective()
            p_arr.flat[j] = orig
            if guard_kinks and any(not np.array_equal(a, b)
                                   for a, b in zip(pat_plus, pat_minus)):
                skipped += 1
                continue
            numeric = (f_plus - f_minus) / (2.0 * step)
            analytic = float(g_arr.flat[j])
            rel = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
            if rel > max_rel:
                max_rel = rel
    return GradCheckReport(max_rel_err=max_rel, passed=max_rel <= tol,
                           skipped_kinks=skipped)


@dataclass
class AdamState:
    """First/second moment buffers plus hyperparameters for Adam."""

    m: GradBuffer
    v: GradBuffer
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(params: MlpParams, lr: float = 1e-3, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    return AdamState(m=grad_zeros(params), v=grad_zeros(params),
                     step=0, lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state: AdamState, params: MlpParams, grads: GradBuffer,
              ascent: bool = False) -> None:
    """One bias-corrected Adam update, applied to params and state in place.

    With ascent=True the step is taken along the gradient instead of against
    it. Starting from a fresh state, a zero gradient leaves params unchanged.
    """
    _check_congruent(params, grads)
    for g in grads.arrays():
        if not np.isfinite(g).all():
            raise NumericError("non-finite gradient entry")
    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    sign = 1.0 if ascent else -1.0
    param_arrays = params.weights + params.biases
    for p, g, m, v in zip(param_arrays, grads.arrays(), state.m.arrays(), state.v.arrays()):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p += sign * state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def adaptive_clip(grads: GradBuffer, cap: float) -> GradBuffer:
    """Rescale a gradient to Frobenius norm min(current norm, cap).

    A zero gradient is returned unchanged (guards the 0/0 in the rescale);
    the output is always collinear with the input.
    """
    if cap < 0:
        raise ValueError("clip cap must be non-negative")
    norm = grads.norm()
    if norm == 0.0:
        return grads.scaled(1.0)
    return grads.scaled(min(norm, cap) / norm)
