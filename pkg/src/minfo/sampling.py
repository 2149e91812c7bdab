"""Seeded synthetic data with known ground truth, plus marginal-batch construction.

Generators are pure functions of (spec, n, rng stream); every experiment owns
its own `numpy.random.Generator`, nothing global.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

NONLINEARITIES = ("identity", "cube", "sine")

_NONLINEAR_FN = {
    "identity": lambda x: x,
    "cube": lambda x: x ** 3,
    "sine": np.sin,
}


def make_rng(seed: int) -> np.random.Generator:
    """Fresh seeded generator; identical seed gives an identical stream."""
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class GaussianSpec:
    """k independent standard-normal pairs with common correlation rho.

    Component i of x correlates only with component i of z; marginals are
    standard normal in every component.
    """

    k: int = 1
    rho: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (-1, 1)")


@dataclass(frozen=True)
class NonlinearSpec:
    """z = f(x) + sigma * noise, componentwise, with x uniform on (-1, 1)^dim."""

    f: str = "identity"
    sigma: float = 0.1
    dim: int = 2

    def __post_init__(self):
        if self.f not in NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.f!r}, expected one of {NONLINEARITIES}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")


@dataclass(frozen=True)
class SampleBatch:
    """Paired rows (x, z) drawn from the joint distribution."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2 or self.z.ndim != 2:
            raise ValueError("x and z must be 2-D arrays")
        if self.x.shape[0] != self.z.shape[0] or self.x.shape[0] < 1:
            raise ValueError("x and z must have the same, positive number of rows")

    @property
    def size(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class MarginalBatch:
    """x rows paired with z rows decoupled from them (product-of-marginals draw)."""

    x: np.ndarray
    z_bar: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2 or self.z_bar.ndim != 2:
            raise ValueError("x and z_bar must be 2-D arrays")
        if self.x.shape[0] != self.z_bar.shape[0] or self.x.shape[0] < 1:
            raise ValueError("x and z_bar must have the same, positive number of rows")

    @property
    def size(self) -> int:
        return self.x.shape[0]


JointSampler = Callable[[int, np.random.Generator], SampleBatch]


def gen_gaussian(spec: GaussianSpec, n: int, rng: np.random.Generator) -> SampleBatch:
    """Draw n joint samples: x = u, z = rho*u + sqrt(1-rho^2)*v with u, v iid N(0, I)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    u = rng.standard_normal((n, spec.k))
    v = rng.standard_normal((n, spec.k))
    z = spec.rho * u + np.sqrt(1.0 - spec.rho * spec.rho) * v
    return SampleBatch(x=u, z=z)


def gen_nonlinear(spec: NonlinearSpec, n: int, rng: np.random.Generator) -> SampleBatch:
    """Draw n joint samples of the noisy-nonlinearity channel."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = rng.uniform(-1.0, 1.0, size=(n, spec.dim))
    z = _NONLINEAR_FN[spec.f](x) + spec.sigma * rng.standard_normal((n, spec.dim))
    return SampleBatch(x=x, z=z)


def make_sampler(spec: GaussianSpec | NonlinearSpec) -> JointSampler:
    """Bind a data spec into a (n, rng) -> SampleBatch sampler."""
    if isinstance(spec, GaussianSpec):
        return lambda n, rng: gen_gaussian(spec, n, rng)
    if isinstance(spec, NonlinearSpec):
        return lambda n, rng: gen_nonlinear(spec, n, rng)
    raise TypeError(f"unsupported data spec {type(spec).__name__}")


def marginal_shuffle(batch: SampleBatch, rng: np.random.Generator) -> MarginalBatch:
    """Decouple z from x by permuting the z rows uniformly at random.

    The multiset of z rows is preserved exactly; x is untouched.
    """
    perm = rng.permutation(batch.size)
    return MarginalBatch(x=batch.x, z_bar=batch.z[perm])


def marginal_resample(sampler: JointSampler, b: int, rng: np.random.Generator) -> MarginalBatch:
    """Build a marginal batch from two independent fresh joint draws.

    x comes from the first draw, z from the second, so the pairing carries no
    dependence at all.
    """
    if b < 1:
        raise ValueError("b must be at least 1")
    first = sampler(b, rng)
    second = sampler(b, rng)
    return MarginalBatch(x=first.x, z_bar=second.z)
