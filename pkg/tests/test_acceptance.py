"""Acceptance suite: every criterion printed and asserted at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion.
"""

import math
import time

import numpy as np

from support import R2_OBS, example_model, random_model, rank_deficient_model

from cedrf import drf, oracle, waterfill
from cedrf.linalg import Matrix
from cedrf.spectral import ObservationModel


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def _golden_max(f, lo: float, hi: float, iters: int = 160):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = f(x1)
    x = (lo + hi) / 2.0
    return x, f(x)


def test_criterion_1_example_thresholds():
    t0 = time.perf_counter()
    model = example_model()
    r2_cond = waterfill.rate_thresholds(model.conditional)[1]
    r2_obs = waterfill.rate_thresholds(model.observation)[1]
    elapsed = time.perf_counter() - t0
    ok = abs(r2_cond - 0.757) <= 0.005 and abs(r2_obs - 1.904) <= 0.005
    _report(
        1,
        "example-model thresholds",
        ok,
        f"R2(conditional)={r2_cond:.6f} (0.757±0.005), "
        f"R2(observation)={r2_obs:.6f} (1.904±0.005), {elapsed * 1e3:.1f} ms",
    )


def test_criterion_2_example_max_gap():
    t0 = time.perf_counter()
    model = example_model()
    # independent numeric maximization of the pointwise gap
    r_num, g_num = _golden_max(lambda r: drf.gap(model, r), 0.76, 6.0)
    elapsed = time.perf_counter() - t0
    ok = abs(g_num - 0.0501) <= 0.0005 and abs(r_num - R2_OBS) <= 1e-6
    _report(
        2,
        "example-model max gap",
        ok,
        f"max G={g_num:.6f} (0.0501±0.0005) at R={r_num:.8f} "
        f"(R2(observation)±1e-6), {elapsed * 1e3:.1f} ms",
    )
    # the closed form agrees with the numeric maximizer
    r_star, g_star = drf.max_gap_2d(20.0, 0.5, 1.0)
    assert abs(r_star - r_num) <= 1e-6 and abs(g_star - g_num) <= 1e-9


def test_criterion_3_equality_region():
    rng = np.random.default_rng(2024_03)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        model = random_model(rng)
        cap = min(drf.equality_region(model).R_limit, 12.0)
        rates = rng.uniform(0.0, cap, size=19)
        for r in list(rates) + [cap]:
            worst = max(worst, abs(drf.ce_drf(model, float(r)) - drf.idrf(model, float(r))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5.0
    _report(
        3,
        "equality region",
        ok,
        f"max |D_CE - D_X|Y| = {worst:.3e} over 200 models x 20 rates "
        f"(tol 1e-10), {elapsed:.2f} s (budget 1 s)",
    )


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(2024_04)
    t0 = time.perf_counter()
    models = [
        ObservationModel(Matrix(rng.uniform(-2, 2, size=(3, 2))), 1.0),  # L > M
        ObservationModel(Matrix(rng.uniform(-2, 2, size=(2, 2))), 1.0),  # L = M
        ObservationModel(Matrix(rng.uniform(-2, 2, size=(2, 3))), 1.0),  # L < M
        rank_deficient_model(rng),
    ]
    models += [random_model(rng) for _ in range(196)]
    worst = 0.0
    for model in models:
        r = float(rng.uniform(0.0, 12.0))
        worst = max(worst, abs(oracle.ce_matrix_form(model, r) - drf.ce_drf(model, r)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 25.0
    _report(
        4,
        "oracle equivalence",
        ok,
        f"max |matrix form - closed form| = {worst:.3e} over 200 pairs "
        f"(tol 1e-9), {elapsed:.2f} s (budget 5 s)",
    )


def test_criterion_5_monte_carlo():
    t0 = time.perf_counter()
    model = example_model()
    n = 1_000_000
    worst_excess = -math.inf
    details = []
    for r, seed in ((0.5, 501), (1.0, 502), (1.9037, 503), (3.0, 504)):
        for name, mc_fn, target in (
            ("ce", oracle.mc_ce, drf.ce_drf(model, r)),
            ("idrf", oracle.mc_idrf, drf.idrf(model, r)),
        ):
            est = mc_fn(model, r, n, seed)
            tol = max(4.0 * est.stderr, 1e-3)
            diff = abs(est.mean - target)
            worst_excess = max(worst_excess, diff - tol)
            details.append(f"{name}@{r}: {diff:.2e}<{tol:.2e}")
    est = oracle.mc_mmse(model, n, 505)
    tol = max(4.0 * est.stderr, 1e-3)
    diff = abs(est.mean - 0.357143)
    worst_excess = max(worst_excess, diff - tol)
    details.append(f"mmse: {diff:.2e}<{tol:.2e}")
    elapsed = time.perf_counter() - t0
    ok = worst_excess <= 0.0
    _report(
        5,
        "Monte Carlo consistency",
        ok,
        f"n=10^6 per run; all {len(details)} runs within max(4*stderr, 1e-3); "
        f"worst excess {worst_excess:.2e}; {elapsed:.2f} s",
    )


def test_criterion_6_bound_sandwich():
    rng = np.random.default_rng(2024_06)
    t0 = time.perf_counter()
    grid = [float(r) for r in np.linspace(0.0, 12.0, 50)]
    worst = 0.0
    increase = 0.0
    for _ in range(200):
        model = random_model(rng)
        points = drf.sweep(model, grid)
        for pt in points:
            worst = max(worst, pt.gap_lb - pt.gap, pt.gap - pt.gap_ub, -(pt.d_ce - pt.d_idrf))
        for a, b in zip(points, points[1:]):
            increase = max(increase, b.d_idrf - a.d_idrf, b.d_ce - a.d_ce)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and increase <= 1e-12 and elapsed < 10.0
    _report(
        6,
        "bound sandwich + monotonicity",
        ok,
        f"max sandwich violation {worst:.3e} (tol 1e-10), max step increase "
        f"{increase:.3e} (tol 1e-12), 200 models x 50 rates, {elapsed:.2f} s (budget 2 s)",
    )


def test_criterion_7_decay_envelope():
    rng = np.random.default_rng(2024_07)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        model = random_model(rng)
        if model.L < 2:
            continue
        s2 = model.sigma2
        const = (model.L / model.M) * (model.gram.values[0] + s2) / (4.0 * s2)
        r2 = waterfill.rate_thresholds(model.observation)[1]
        for r in np.linspace(r2 + 1e-9, 12.0, 50):
            r = float(r)
            if r <= r2:
                continue
            normalized = drf.gap(model, r) * 2.0 ** (2.0 * r / model.L)
            worst = max(worst, normalized - const)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(
        7,
        "exponential decay envelope",
        ok,
        f"max G(R) 2^(2R/L) excess over the bound constant = {worst:.3e} "
        f"(slack 1e-10), {elapsed:.2f} s (budget 1 s)",
    )


def test_criterion_8_am_gm_lemmas():
    rng = np.random.default_rng(2024_08)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(1, 11))
        vals = rng.lognormal(0.0, 1.0, size=n)
        got = drf.am_gm_pair(vals)
        worst = max(
            worst,
            got.gm - got.am,
            got.am - got.reverse_bound,
            got.lower_bound - got.am,
        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 5.0
    _report(
        8,
        "mean-bound lemmas",
        ok,
        f"max violation of GM <= AM <= reverse bound and AM >= lower bound: "
        f"{worst:.3e} (slack 1e-12), 10000 vectors, {elapsed:.2f} s (budget 1 s)",
    )
