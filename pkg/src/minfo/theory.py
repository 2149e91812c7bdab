"""Executable sample-complexity bound and the dv-dominates-f sanity check."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimator import dv_value, f_value


@dataclass(frozen=True)
class ComplexityInputs:
    """Problem constants for the sample-complexity bound.

    d: parameter-space dimension; bound: sup of |T| over the family;
    lipschitz: Lipschitz constant of T in the parameters; param_norm:
    radius of the parameter domain; eps: target accuracy; delta: allowed
    failure probability.
    """

    d: int = 1
    bound: float = 1.0
    lipschitz: float = 1.0
    param_norm: float = 1.0
    eps: float = 0.1
    delta: float = 0.05

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        for name in ("bound", "lipschitz", "param_norm", "eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie strictly inside (0, 1)")


def sample_complexity(inputs: ComplexityInputs) -> int:
    """Samples sufficient for eps-accurate estimation with confidence 1 - delta:

        ceil( 2 M^2 (d log(16 K L sqrt(d) / eps) + 2 d M + log(2 / delta)) / eps^2 )

    with M = bound, L = lipschitz, K = param_norm. Natural logs throughout.
    """
    log_arg = 16.0 * inputs.param_norm * inputs.lipschitz * math.sqrt(inputs.d) / inputs.eps
    if log_arg <= 1.0:
        raise ValueError("16*K*L*sqrt(d)/eps must exceed 1 for the bound to apply")
    m = inputs.bound
    rhs = 2.0 * m * m * (inputs.d * math.log(log_arg) + 2.0 * inputs.d * m
                         + math.log(2.0 / inputs.delta)) / (inputs.eps * inputs.eps)
    return math.ceil(rhs)


@dataclass(frozen=True)
class DominanceReport:
    dv: float
    f: float
    holds: bool


def dv_dominates_f_check(t_joint, t_marg) -> DominanceReport:
    """Evaluate both dual bounds on the same statistics and confirm dv >= f.

    The inequality holds for every finite input (set u = mean(exp(t_marg));
    then log u <= u/e, i.e. the identity u >= e log u); `holds` allows 1e-12
    of float slack.
    """
    dv = dv_value(t_joint, t_marg)
    f = f_value(t_joint, t_marg)
    return DominanceReport(dv=dv, f=f, holds=dv >= f - 1e-12)
