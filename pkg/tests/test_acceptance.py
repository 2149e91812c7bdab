"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with output streaming to see the lines as they complete:

    pytest -v -s tests/test_acceptance.py

The heavy criteria train real networks on one core; the full suite takes
roughly half an hour.
"""

import math
import time

import numpy as np
import pytest

from minfo.baselines import KsgConfig, gaussian_mi_analytic, ksg_estimate
from minfo.cli import main, rows_from_csv
from minfo.estimator import (
    EmaState,
    EstimatorConfig,
    corrected_gradient,
    dv_value,
    ema_update,
    f_value,
    naive_gradient,
    train_mine,
)
from minfo.nn import GradBuffer, adaptive_clip, grad_check, mlp_forward, mlp_init
from minfo.sampling import (
    GaussianSpec,
    NonlinearSpec,
    gen_gaussian,
    make_rng,
    make_sampler,
    marginal_shuffle,
)
from minfo.theory import ComplexityInputs, dv_dominates_f_check, sample_complexity


def report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_gaussian_accuracy_low_dim():
    # k in {1, 2}, rho in {+-0.3, +-0.6, +-0.9}: |estimate - truth| <= 0.1 nats
    # with defaults (10000 steps <= 20000), each point well under 2 min on one core
    failures = []
    worst_err = 0.0
    worst_time = 0.0
    idx = 0
    for k in (1, 2):
        for mag in (0.3, 0.6, 0.9):
            for sign in (1.0, -1.0):
                rho = sign * mag
                spec = GaussianSpec(k=k, rho=rho)
                truth = gaussian_mi_analytic(spec)
                started = time.perf_counter()
                result = train_mine(EstimatorConfig(seed=1000 + idx), make_sampler(spec))
                elapsed = time.perf_counter() - started
                err = abs(result.nats - truth)
                worst_err = max(worst_err, err)
                worst_time = max(worst_time, elapsed)
                if err > 0.1 or elapsed > 150.0:
                    failures.append(f"k={k} rho={rho}: err={err:.4f} t={elapsed:.0f}s")
                idx += 1
    report(1, not failures,
           f"12 points, worst |err|={worst_err:.4f} (<=0.1), worst point "
           f"time={worst_time:.0f}s" + (f"; failures: {failures}" if failures else ""))


def test_criterion_02_gaussian_accuracy_high_dim():
    # k=20, rho=0.5 (truth ~2.8768): within 10% relative error in <= 50000 steps
    spec = GaussianSpec(k=20, rho=0.5)
    truth = gaussian_mi_analytic(spec)
    cfg = EstimatorConfig(hidden=(200, 200), batch_size=1024, steps=30000,
                          eval_size=8192, seed=7)
    started = time.perf_counter()
    result = train_mine(cfg, make_sampler(spec))
    elapsed = time.perf_counter() - started
    rel = abs(result.nats - truth) / truth
    ok = rel <= 0.10 and elapsed <= 900.0
    report(2, ok, f"k=20 rho=0.5: estimate={result.nats:.4f} truth={truth:.4f} "
                  f"rel_err={rel:.2%} (<=10%), {cfg.steps} steps in {elapsed:.0f}s")


def test_criterion_03_dv_tighter_than_f():
    # k=2, rho=0.8: mine_f final estimate <= mine_dv final estimate + 0.05, 5 seeds
    sampler = make_sampler(GaussianSpec(k=2, rho=0.8))
    gaps = []
    for seed in range(5):
        dv = train_mine(EstimatorConfig(seed=seed), sampler).nats
        f = train_mine(EstimatorConfig(objective="f", seed=seed), sampler).nats
        gaps.append(f - dv)
    ok = all(g <= 0.05 for g in gaps)
    report(3, ok, "f-minus-dv gaps across 5 seeds: "
                  + ", ".join(f"{g:+.4f}" for g in gaps) + " (each <= +0.05)")


def test_criterion_04_dominance_property():
    # dv_value >= f_value on 10^4 random finite vector pairs, slack 1e-12
    rng = np.random.default_rng(4)
    violations = 0
    worst_margin = math.inf
    for _ in range(10000):
        scale = float(rng.uniform(0.05, 8.0))
        shift = float(rng.uniform(-3.0, 3.0))
        tj = rng.standard_normal(int(rng.integers(1, 40))) * scale + shift
        tm = rng.standard_normal(int(rng.integers(1, 40))) * scale + shift
        outcome = dv_dominates_f_check(tj, tm)
        worst_margin = min(worst_margin, outcome.dv - outcome.f)
        if not outcome.holds:
            violations += 1
    report(4, violations == 0,
           f"10000 random pairs, violations={violations}, smallest dv-f margin="
           f"{worst_margin:.3e}")


def test_criterion_05_ksg_baseline():
    # k=1 Gaussians, n=5000, 3 neighbors: within 0.1 nats for rho in {0, 0.5, 0.9}
    errs = {}
    for i, rho in enumerate((0.0, 0.5, 0.9)):
        spec = GaussianSpec(k=1, rho=rho)
        batch = gen_gaussian(spec, 5000, make_rng(50 + i))
        est = ksg_estimate(batch, KsgConfig(k=3, seed=50 + i))
        errs[rho] = abs(est.nats - gaussian_mi_analytic(spec))
    ok = all(e <= 0.1 for e in errs.values())
    report(5, ok, "KSG n=5000 k_nn=3 abs errors: "
                  + ", ".join(f"rho={r}: {e:.4f}" for r, e in errs.items()) + " (each <= 0.1)")


# True dim-2 mutual information of z = f(x) + sigma*eps, x ~ U(-1,1)^2, from
# numerical quadrature of h(Y) - h(sigma*eps) (twice the 1-D channel value).
QUADRATURE_SPREAD = {0.1: 0.835, 0.2: 0.664, 0.3: 0.559, 0.5: 0.386, 0.7: 0.261, 1.0: 0.154}


def test_criterion_06_equitability_spread():
    # Spread across f in {x, x^3, sin x} of MINE-DV estimates <= 0.1 nats per sigma,
    # dim=2, <= 20000 steps per cell. The underlying mutual information itself
    # spreads far wider than 0.1 nats (see QUADRATURE_SPREAD), so an accurate
    # estimator cannot satisfy this bound; asserted as stated regardless.
    sigmas = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    estimates = {}
    for fi, f in enumerate(("identity", "cube", "sine")):
        for si, sigma in enumerate(sigmas):
            spec = NonlinearSpec(f=f, sigma=sigma, dim=2)
            cfg = EstimatorConfig(seed=6000 + 100 * fi + si)
            estimates[(f, sigma)] = train_mine(cfg, make_sampler(spec)).nats
    spreads = {}
    for sigma in sigmas:
        vals = [estimates[(f, sigma)] for f in ("identity", "cube", "sine")]
        spreads[sigma] = max(vals) - min(vals)
    # estimates should decay with noise for every f (0.05 slack between neighbors)
    decay_ok = all(
        estimates[(f, lo)] >= estimates[(f, hi)] - 0.05
        for f in ("identity", "cube", "sine")
        for lo, hi in zip(sigmas, sigmas[1:]))
    detail = ", ".join(
        f"sigma={s}: {sp:.3f}" + (f" (true {QUADRATURE_SPREAD[s]:.3f})"
                                  if s in QUADRATURE_SPREAD else "")
        for s, sp in spreads.items())
    ok = all(sp <= 0.1 for sp in spreads.values())
    report(6, ok, f"decay-in-sigma holds for all f: {decay_ok}; "
                  f"per-sigma estimate spreads vs 0.1 bound: {detail}")


def test_criterion_07_gradient_integrity():
    # grad_check max relative error <= 1e-4 on 20 random network/batch configs
    rng = np.random.default_rng(7)
    worst = 0.0
    failures = 0
    for t in range(20):
        input_dim = int(rng.integers(1, 7))
        hidden = [int(rng.integers(2, 33)) for _ in range(int(rng.integers(1, 4)))]
        activation = "relu" if t % 2 == 0 else "elu"
        params = mlp_init(input_dim, hidden, activation, seed=int(rng.integers(0, 2 ** 31)))
        inputs = rng.standard_normal((int(rng.integers(4, 33)), input_dim))
        rep = grad_check(params, inputs, tol=1e-4)
        worst = max(worst, rep.max_rel_err)
        failures += 0 if rep.passed else 1
    report(7, failures == 0,
           f"20 configurations, failures={failures}, worst max_rel_err={worst:.3e} (<=1e-4)")


def test_criterion_08_ema_correction_identities():
    # corrected == naive when the EMA holds the batch denominator (<= 1e-12),
    # plus exact fixed-point and alpha=1 degenerate behavior
    worst = 0.0
    for seed in range(20):
        rng = make_rng(seed)
        joint = gen_gaussian(GaussianSpec(k=2, rho=0.6), 32, rng)
        marg = marginal_shuffle(joint, rng)
        params = mlp_init(4, [14, 10], "relu" if seed % 2 else "elu", seed=seed)
        t_marg = mlp_forward(params, np.hstack([marg.x, marg.z_bar]))
        ema = EmaState(value=float(np.exp(t_marg).mean()), initialized=True)
        g_n, v_n = naive_gradient(params, joint, marg)
        g_c, v_c = corrected_gradient(params, joint, marg, ema)
        worst = max(worst, abs(v_n - v_c))
        for a, b in zip(g_n.arrays(), g_c.arrays()):
            worst = max(worst, float(np.max(np.abs(a - b))))
    fixed = ema_update(EmaState(value=4.0, initialized=True), 4.0, alpha=0.25).value == 4.0
    alpha_one = ema_update(EmaState(value=9.0, initialized=True), 2.5, alpha=1.0).value == 2.5
    adopt = ema_update(EmaState(), 3.5, alpha=0.01).value == 3.5
    ok = worst <= 1e-12 and fixed and alpha_one and adopt
    report(8, ok, f"corrected-vs-naive worst discrepancy={worst:.3e} (<=1e-12), "
                  f"fixed_point={fixed}, alpha1={alpha_one}, init_adopts={adopt}")


def test_criterion_09_adaptive_clipping():
    # output norm = min(input norm, cap) and collinearity on 1000 random buffers
    rng = np.random.default_rng(9)
    worst_norm = 0.0
    worst_dir = 0.0
    for _ in range(1000):
        shapes = [(int(rng.integers(1, 8)), int(rng.integers(1, 8)))
                  for _ in range(int(rng.integers(1, 4)))]
        g = GradBuffer(weights=[rng.standard_normal(s) * rng.uniform(0.01, 10) for s in shapes],
                       biases=[rng.standard_normal(s[0]) for s in shapes])
        cap = float(rng.uniform(0.01, 15.0))
        out = adaptive_clip(g, cap)
        expected = min(g.norm(), cap)
        worst_norm = max(worst_norm, abs(out.norm() - expected) / expected)
        scale = out.norm() / g.norm()
        for a, b in zip(g.arrays(), out.arrays()):
            if a.size:
                worst_dir = max(worst_dir, float(np.max(np.abs(b - scale * a))))
    zeros = GradBuffer(weights=[np.zeros((3, 3))], biases=[np.zeros(3)])
    zero_ok = all(np.all(a == 0.0) for a in adaptive_clip(zeros, 5.0).arrays())
    ok = worst_norm <= 1e-12 and worst_dir <= 1e-12 and zero_ok
    report(9, ok, f"1000 buffers: worst norm rel err={worst_norm:.3e}, worst "
                  f"collinearity residual={worst_dir:.3e}, zero guard={zero_ok}")


def test_criterion_10_sample_complexity_calculator():
    n1 = sample_complexity(ComplexityInputs(d=1, bound=1, lipschitz=1, param_norm=1,
                                            eps=0.1, delta=0.05))
    n2 = sample_complexity(ComplexityInputs(d=2, bound=1, lipschitz=1, param_norm=1,
                                            eps=0.1, delta=0.1))
    mono_ok = True
    rng = np.random.default_rng(10)
    import dataclasses
    for _ in range(100):
        base = ComplexityInputs(d=int(rng.integers(1, 40)),
                                bound=float(rng.uniform(0.5, 4.0)),
                                lipschitz=float(rng.uniform(0.5, 4.0)),
                                param_norm=float(rng.uniform(0.5, 4.0)),
                                eps=float(rng.uniform(0.02, 0.4)),
                                delta=float(rng.uniform(0.02, 0.5)))
        n = sample_complexity(base)
        for name, factor, direction in (("bound", 1.5, 1), ("lipschitz", 1.5, 1),
                                        ("param_norm", 1.5, 1), ("eps", 1.5, -1),
                                        ("delta", 1.5, -1)):
            value = getattr(base, name) * factor
            if name == "delta":
                value = min(0.99, value)
            changed = sample_complexity(dataclasses.replace(base, **{name: value}))
            if direction > 0 and changed < n:
                mono_ok = False
            if direction < 0 and changed > n:
                mono_ok = False
        if sample_complexity(dataclasses.replace(base, d=base.d + 1)) < n:
            mono_ok = False
    ok = n1 == 2153 and n2 == 3568 and mono_ok
    report(10, ok, f"reference points: {n1} (expect 2153), {n2} (expect 3568); "
                   f"monotonicity on randomized grid={mono_ok}")


def test_criterion_11_cli_determinism(tmp_path):
    checks = []

    def run(argv):
        assert main(argv) == 0, f"CLI run failed: {argv}"

    a, b = tmp_path / "e1.csv", tmp_path / "e2.csv"
    run(["estimate", "--steps", "40", "--seed", "5", "--out", str(a)])
    run(["estimate", "--steps", "40", "--seed", "5", "--out", str(b)])
    checks.append(("estimate repeat", a.read_bytes() == b.read_bytes()))

    s1, s2, s3 = (tmp_path / f"s{i}.csv" for i in (1, 2, 3))
    sweep = ["sweep", "--rho-grid", "0.0,0.5", "--steps", "25", "--samples", "400",
             "--seed", "3"]
    run(sweep + ["--jobs", "1", "--out", str(s1)])
    run(sweep + ["--jobs", "1", "--out", str(s2)])
    run(sweep + ["--jobs", "2", "--out", str(s3)])
    checks.append(("sweep repeat", s1.read_bytes() == s2.read_bytes()))
    checks.append(("sweep parallel==sequential", s1.read_bytes() == s3.read_bytes()))

    q1, q2 = tmp_path / "q1.json", tmp_path / "q2.json"
    run(["equitability", "--steps", "20", "--format", "json", "--seed", "4",
         "--out", str(q1)])
    run(["equitability", "--steps", "20", "--format", "json", "--seed", "4",
         "--out", str(q2)])
    checks.append(("equitability repeat", q1.read_bytes() == q2.read_bytes()))

    failed = [name for name, ok in checks if not ok]
    report(11, not failed, "byte-identical artifacts: "
           + ", ".join(f"{name}={'ok' if ok else 'DIFFERS'}" for name, ok in checks))


def test_criterion_12_independence_sanity():
    # rho=0 and sigma-large cells: estimates within 0.05 of zero for MINE and KSG
    results = {}

    mine_rho0 = train_mine(EstimatorConfig(seed=12), make_sampler(GaussianSpec(k=1, rho=0.0)))
    results["mine rho=0"] = mine_rho0.nats

    noisy = NonlinearSpec(f="identity", sigma=10.0, dim=2)
    mine_noise = train_mine(EstimatorConfig(seed=13), make_sampler(noisy))
    results["mine sigma=10"] = mine_noise.nats

    ksg_rho0 = ksg_estimate(gen_gaussian(GaussianSpec(k=1, rho=0.0), 5000, make_rng(14)),
                            KsgConfig(k=3))
    results["ksg rho=0"] = ksg_rho0.nats

    from minfo.sampling import gen_nonlinear
    ksg_noise = ksg_estimate(gen_nonlinear(noisy, 5000, make_rng(15)), KsgConfig(k=3))
    results["ksg sigma=10"] = ksg_noise.nats

    ok = all(abs(v) <= 0.05 for v in results.values())
    report(12, ok, ", ".join(f"{name}: {v:+.4f}" for name, v in results.items())
           + " (each within 0.05 of 0)")
