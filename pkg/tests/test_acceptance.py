"""Acceptance gate.

Each test covers one acceptance criterion, prints a single
``[criterion] PASS/FAIL detail`` line, and then asserts.  Run with
``pytest tests/test_acceptance.py -v -s`` to see the lines.

The frozen gain values are percentages for the ten-fold linear fluid
(mu = 1 + 9c) and the ten-fold exponential fluid (mu = 10^c) at slug
counts 2, 3, 4, 5, 10 and in the many-slug limit.
"""

import time

import numpy as np
import pytest

from gvbopt import (
    TFE,
    CustomFlux,
    ExponentialViscosity,
    GeneralizedKoval,
    KovalFlux,
    LinearViscosity,
    OptimizerOptions,
    PowerCubicViscosity,
    ToddLongstaffFlux,
    breakthrough_times,
    brute_force,
    check_no_breakthrough,
    convergence_study,
    gain,
    limiting_beta,
    limiting_profile,
    naive_koval,
    optimize,
    refine_partition,
    single_slug_volume,
    two_slug_scan,
    volume,
)

MODELS = (
    ("tfe", TFE),
    ("tl", GeneralizedKoval(ToddLongstaffFlux(2.0 / 3.0))),
    ("naive", GeneralizedKoval(naive_koval())),
    ("koval", GeneralizedKoval(KovalFlux(0.22))),
)
LINEAR = LinearViscosity(1.0, 9.0)
EXPONENTIAL = ExponentialViscosity(1.0, np.log(10.0))
COUNTS = (2, 3, 4, 5, 10)

# frozen reference gains, percent; last entry is the many-slug limit
REFERENCE_LINEAR = {
    "tfe": (19.83, 23.35, 24.57, 25.13, 25.88, 26.12),
    "tl": (24.84, 29.36, 30.93, 31.66, 32.63, 32.95),
    "naive": (22.50, 26.67, 28.12, 28.80, 29.70, 30.00),
    "koval": (33.21, 39.24, 41.46, 42.55, 44.24, 45.28),
}
REFERENCE_EXPONENTIAL = {
    "tfe": (13.24, 15.93, 16.89, 17.34, 17.94, 18.14),
    "tl": (9.07, 10.77, 11.36, 11.64, 12.01, 12.13),
    "naive": (9.52, 11.32, 11.96, 12.25, 12.64, 12.78),
    "koval": (13.06, 16.14, 17.47, 18.22, 19.57, 20.75),
}

# optimizer outputs are reused across criteria; filled once on demand
_RESULTS = {}


def _report(criterion, ok, detail):
    print(f"\n[{criterion}] {'PASS' if ok else 'FAIL'} {detail}")


def _results():
    if not _RESULTS:
        start = time.perf_counter()
        for fluid_name, fluid in (("linear", LINEAR), ("exp", EXPONENTIAL)):
            for label, fingering in MODELS:
                for n in COUNTS:
                    res = optimize(fingering, fluid, n)
                    _RESULTS[(fluid_name, label, n)] = res
        _RESULTS["elapsed"] = time.perf_counter() - start
    return _RESULTS


def test_c01_limiting_gains_linear():
    start = time.perf_counter()
    got = {
        label: 100.0 * limiting_profile(fingering, LINEAR).limiting_gain
        for label, fingering in MODELS
    }
    elapsed = time.perf_counter() - start
    worst = max(abs(got[k] - REFERENCE_LINEAR[k][-1]) for k in got)
    ok = worst <= 0.05 and elapsed < 1.0
    _report(
        "c01-limits-linear",
        ok,
        f"worst {worst:.4f} pp of 0.05, {elapsed:.2f}s of 1s budget",
    )
    assert worst <= 0.05
    assert elapsed < 1.0


def test_c02_limiting_gains_exponential():
    got = {
        label: 100.0 * limiting_profile(fingering, EXPONENTIAL).limiting_gain
        for label, fingering in MODELS
    }
    worst = max(abs(got[k] - REFERENCE_EXPONENTIAL[k][-1]) for k in got)
    ok = worst <= 0.05
    _report("c02-limits-exp", ok, f"worst {worst:.4f} pp of 0.05")
    assert ok


def test_c03_gain_tables():
    results = _results()
    worst = 0.0
    where = None
    for fluid_name, table in (("linear", REFERENCE_LINEAR), ("exp", REFERENCE_EXPONENTIAL)):
        for label, _ in MODELS:
            for pos, n in enumerate(COUNTS):
                got = 100.0 * results[(fluid_name, label, n)].gain
                err = abs(got - table[label][pos])
                if err > worst:
                    worst, where = err, (fluid_name, label, n)
    elapsed = results["elapsed"]
    ok = worst <= 0.15 and elapsed < 60.0
    _report(
        "c03-gain-tables",
        ok,
        f"40 cells, worst {worst:.4f} pp of 0.15 at {where}, {elapsed:.1f}s of 60s",
    )
    assert worst <= 0.15
    assert elapsed < 60.0


def test_c04_matches_exhaustive_search():
    worst = 0.0
    for fluid in (LINEAR, EXPONENTIAL):
        for label, fingering in MODELS:
            for n in (2, 3):
                ref = brute_force(fingering, fluid, n)
                res = optimize(fingering, fluid, n, OptimizerOptions(multi_starts=4))
                worst = max(worst, res.volume - ref.volume)
    ok = worst <= 1e-4
    _report("c04-oracle", ok, f"16 combos, worst excess volume {worst:.2e} of 1e-4")
    assert ok


def test_c05_time_formulas_agree():
    rng = np.random.default_rng(2026)
    fluids = (LINEAR, EXPONENTIAL, PowerCubicViscosity(1.0, 1.5))
    worst = 0.0
    checked = 0
    for trial in range(120):
        n = int(rng.integers(1, 21))
        cuts = np.sort(rng.uniform(0.01, 0.99, size=n - 1))[::-1]
        c = np.concatenate(([1.0], cuts, [0.0]))
        fluid = fluids[trial % len(fluids)]
        _, fingering = MODELS[trial % len(MODELS)]
        closed = breakthrough_times(fingering, fluid, c, method="closed")
        product = breakthrough_times(fingering, fluid, c, method="product")
        worst = max(worst, float(np.max(np.abs(closed - product))))
        checked += 1
    ok = worst <= 1e-12 and checked >= 100
    _report("c05-dual-times", ok, f"{checked} partitions, worst gap {worst:.2e} of 1e-12")
    assert ok


def test_c06_outputs_prevent_breakthrough():
    results = _results()
    worst = 0.0
    for key, res in results.items():
        if key == "elapsed":
            continue
        fluid = LINEAR if key[0] == "linear" else EXPONENTIAL
        fingering = dict(MODELS)[key[1]]
        report = check_no_breakthrough(fingering, fluid, res.configuration)
        worst = max(worst, report.worst)
    ok = worst <= 1e-10
    _report("c06-feasibility", ok, f"40 configurations, worst residual {worst:.2e} of 1e-10")
    assert ok


def test_c07_profiles_approach_limit():
    for label, fingering in (("tfe", TFE), ("tl", dict(MODELS)["tl"])):
        points = convergence_study(
            fingering, LINEAR, (2, 5, 10, 50), OptimizerOptions(multi_starts=4)
        )
        sup = [p.sup_distance for p in points]
        rank = [p.rank for p in points]
        sup_ok = all(b < a for a, b in zip(sup, sup[1:]))
        rank_ok = all(b < a for a, b in zip(rank, rank[1:]))
        ok = sup_ok and rank_ok
        _report(
            f"c07-convergence-{label}",
            ok,
            f"sup {sup[0]:.3f}->{sup[-1]:.4f}, rank {rank[0]:.3f}->{rank[-1]:.4f}",
        )
        assert sup_ok, sup
        assert rank_ok, rank


def test_c08_grading_can_backfire():
    fingering = dict(MODELS)["tl"]
    fluid = PowerCubicViscosity(1.0, 1.5)
    v1 = single_slug_volume(fingering, fluid)
    interior, vols = two_slug_scan(fingering, fluid)
    all_above = bool(np.all(vols > v1))
    edges_close = vols[0] - v1 < 1e-2 and vols[-1] - v1 < 1e-2
    config = optimize(fingering, fluid, 1).configuration
    refined = refine_partition(fingering, fluid, config)
    unchanged = refined is config
    ok = abs(v1 - 0.5) < 1e-12 and all_above and edges_close and unchanged
    _report(
        "c08-counterexample",
        ok,
        f"V1 {v1:.15f}, {len(vols)} splits all worse: {all_above}, "
        f"refinement kept single slug: {unchanged}",
    )
    assert abs(v1 - 0.5) < 1e-12
    assert all_above
    assert edges_close
    assert unchanged


def test_c09_limit_exponents():
    exact = {
        "tfe": 1.0,
        "tl": 2.0 * (2.0 / 3.0),
        "naive": 2.0,
        "koval": 0.44,
    }
    bad = [
        label
        for label, fingering in MODELS
        if limiting_beta(fingering) != exact[label]
    ]
    custom = GeneralizedKoval(CustomFlux(lambda x: x ** (-2.0 / 3.0), "tl-as-callable"))
    custom_err = abs(limiting_beta(custom) - 4.0 / 3.0)
    ok = not bad and custom_err <= 1e-6
    _report(
        "c09-exponents",
        ok,
        f"coded models exact: {not bad}, callable beta error {custom_err:.2e} of 1e-6",
    )
    assert not bad, bad
    assert custom_err <= 1e-6


def test_c10_permeability_invariance():
    c = np.array([1.0, 0.8, 0.5, 0.2, 0.0])
    worst = 0.0
    for base, scaled in (
        (LINEAR, LinearViscosity(1.0, 9.0, permeability=1000.0)),
        (EXPONENTIAL, ExponentialViscosity(1.0, np.log(10.0), permeability=1000.0)),
    ):
        for label, fingering in MODELS:
            t_a = breakthrough_times(fingering, base, c)
            t_b = breakthrough_times(fingering, scaled, c)
            worst = max(worst, float(np.max(np.abs(t_a - t_b))))
            v_a, v_b = volume(c, t_a), volume(c, t_b)
            worst = max(worst, abs(v_a - v_b))
            g_a = gain(single_slug_volume(fingering, base), v_a)
            g_b = gain(single_slug_volume(fingering, scaled), v_b)
            worst = max(worst, abs(g_a - g_b))
            lim_a = limiting_profile(fingering, base)
            lim_b = limiting_profile(fingering, scaled)
            worst = max(worst, abs(lim_a.limiting_gain - lim_b.limiting_gain))
            worst = max(worst, abs(lim_a.beta - lim_b.beta))
    ok = worst <= 1e-12
    _report("c10-permeability", ok, f"worst drift {worst:.2e} of 1e-12")
    assert ok
