"""Volume-minimal concentration partitions and their n -> infinity limit.

For a fixed slug count n the injected volume is minimized over the interior
concentrations of the partition (endpoints pinned to the model domain), with
switch times always taken at the no-breakthrough equality.  The search uses
a gap parameterization that keeps partitions strictly decreasing, a
Nelder-Mead stage from several deterministic starts, and a cyclic
golden-section polish.  An exhaustive grid scan over two- and three-slug
partitions serves as an independent oracle, and the refinement limit of the
optimal step profiles has the closed form 1 - (mu(c)/mu(c_max))**beta.
"""

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .fluids import (
    GeneralizedKoval,
    TransverseFlowEquilibrium,
    concentration_at_viscosity,
)
from .schedule import (
    SlugConfiguration,
    _times_closed,
    breakthrough_times,
    profile_of,
    single_slug_volume,
    volume,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerOptions:
    """Search controls.

    ``initial_step`` is the Nelder-Mead simplex scale in concentration
    units; None means 5% of the domain width.  ``oracle_grid_step`` sets the
    default resolution of the exhaustive scans.
    """

    multi_starts: int = 8
    max_iterations: int = 10_000
    volume_tolerance: float = 1e-11
    initial_step: Optional[float] = None
    rng_seed: int = 0
    oracle_grid_step: float = 1e-3

    def __post_init__(self):
        if self.multi_starts < 1:
            raise ValueError(f"multi_starts must be >= 1, got {self.multi_starts}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.volume_tolerance < 1e-6:
            raise ValueError(
                f"volume_tolerance must be in (0, 1e-6), got {self.volume_tolerance}"
            )
        if self.initial_step is not None and self.initial_step <= 0.0:
            raise ValueError(f"initial_step must be positive, got {self.initial_step}")
        if self.oracle_grid_step <= 0.0:
            raise ValueError(
                f"oracle_grid_step must be positive, got {self.oracle_grid_step}"
            )


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    concentrations: np.ndarray
    switch_times: np.ndarray
    volume: float
    gain: float
    rank: float
    converged: bool
    iterations: int
    starts_agreeing: int

    @property
    def n(self):
        return self.concentrations.size - 1

    @property
    def configuration(self):
        return SlugConfiguration(self.concentrations, self.switch_times)

    def as_dict(self):
        return {
            "n": self.n,
            "concentrations": [float(v) for v in self.concentrations],
            "switch_times": [float(v) for v in self.switch_times],
            "volume": self.volume,
            "gain": self.gain,
            "rank": self.rank,
            "converged": self.converged,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")


def _volume_evaluator(fingering, model):
    """Fastest available partition -> volume map for the model pair."""
    spec = model._kernel
    k = model.permeability
    if isinstance(fingering, TransverseFlowEquilibrium) and spec is not None:
        return lambda c: _kernels.partition_volume_tfe(*spec, k, c)
    if isinstance(fingering, GeneralizedKoval) and spec is not None:
        fspec = fingering.flux._kernel
        if fspec is not None:
            return lambda c: _kernels.partition_volume_gk(*fspec, *spec, k, c)

    def general(c):
        t = _times_closed(fingering, model, c)
        return float(np.sum((c[:-1] - c[1:]) * t[:-1]) + c[-1])

    return general


def _partition_from_u(u, lo, hi):
    """Map free gap parameters to a strictly decreasing partition.

    The n gap widths are proportional to (exp(u_1), ..., exp(u_{n-1}), 1),
    which pins the endpoints exactly and keeps every gap positive for any
    real u.
    """
    gaps = np.empty(u.size + 1)
    gaps[:-1] = np.exp(np.clip(u, -40.0, 40.0))
    gaps[-1] = 1.0
    delta = (hi - lo) * gaps / gaps.sum()
    c = np.empty(u.size + 2)
    c[0] = hi
    c[1:] = hi - np.cumsum(delta)
    c[-1] = lo
    return c


def _u_from_partition(c):
    gaps = c[:-1] - c[1:]
    return np.log(gaps[:-1] / gaps[-1])


def _geometric_seed(model, n):
    """Partition whose viscosities form a geometric ladder."""
    mu_lo = model.viscosity(model.c_min)
    mu_hi = model.viscosity(model.c_max)
    ratio = (mu_lo / mu_hi) ** (1.0 / n)
    c = np.empty(n + 1)
    c[0] = model.c_max
    c[-1] = model.c_min
    for j in range(1, n):
        c[j] = concentration_at_viscosity(model, mu_hi * ratio**j)
    return c


def _golden_min(f, a, b, xtol):
    """Golden-section minimum of f on [a, b]; returns (x, f(x))."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _polish(evaluate, c, v_start, tol, counter):
    """Cyclic golden-section sweeps over the interior concentrations."""
    c = c.copy()
    width = c[0] - c[-1]
    margin = 1e-12 * width
    xtol = 1e-10 * width
    v_cur = v_start
    for _ in range(100):
        v_before = v_cur
        for i in range(1, c.size - 1):
            lo = c[i + 1] + margin
            hi = c[i - 1] - margin
            if hi <= lo:
                continue

            def coord(x, i=i):
                c[i] = x
                counter[0] += 1
                return evaluate(c)

            x_best, v_best = _golden_min(coord, lo, hi, xtol)
            c[i] = x_best
            v_cur = v_best
        if v_before - v_cur <= tol:
            break
    return c, v_cur


def optimize(fingering, model, n, options=None):
    """Volume-minimal n-slug configuration for the model pair.

    Runs ``multi_starts`` deterministic searches; the result is flagged
    converged when the two best starts agree in volume within ten times
    ``volume_tolerance``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"slug count must be a positive integer, got {n!r}")
    opts = options or OptimizerOptions()
    lo, hi = model.c_min, model.c_max
    v_single = single_slug_volume(fingering, model)

    if n == 1:
        c = np.array([hi, lo])
        t = breakthrough_times(fingering, model, c)
        return OptimizationResult(
            concentrations=c,
            switch_times=t,
            volume=volume(c, t),
            gain=0.0,
            rank=hi - lo,
            converged=True,
            iterations=0,
            starts_agreeing=opts.multi_starts,
        )

    evaluate = _volume_evaluator(fingering, model)
    counter = [0]

    def objective(u):
        counter[0] += 1
        return evaluate(_partition_from_u(u, lo, hi))

    width = hi - lo
    step = opts.initial_step if opts.initial_step is not None else 0.05 * width
    h = math.log1p(n * step / width)
    rng = np.random.default_rng(opts.rng_seed)

    base_seeds = [np.zeros(n - 1), _u_from_partition(_geometric_seed(model, n))]
    seeds = []
    for s in range(opts.multi_starts):
        if s < 2:
            seeds.append(base_seeds[s])
        else:
            seeds.append(base_seeds[s % 2] + rng.normal(0.0, 0.5, n - 1))

    candidates = []
    any_nm_converged = False
    for u0 in seeds:
        simplex = np.vstack([u0] + [u0 + h * e for e in np.eye(n - 1)])
        res = minimize(
            objective,
            u0,
            method="Nelder-Mead",
            options={
                "maxfev": opts.max_iterations,
                "fatol": opts.volume_tolerance,
                "xatol": 1e-8,
                "adaptive": True,
                "initial_simplex": simplex,
            },
        )
        any_nm_converged = any_nm_converged or bool(res.success)
        c0 = _partition_from_u(res.x, lo, hi)
        c_fin, v_fin = _polish(
            evaluate, c0, float(res.fun), opts.volume_tolerance, counter
        )
        candidates.append((v_fin, tuple(c_fin)))

    candidates.sort()
    v_best, c_best = candidates[0]
    agree = sum(1 for v, _ in candidates if v <= v_best + 10.0 * opts.volume_tolerance)
    if opts.multi_starts == 1:
        converged = any_nm_converged
    else:
        converged = agree >= 2

    c = np.asarray(c_best)
    t = breakthrough_times(fingering, model, c)
    v = volume(c, t)
    return OptimizationResult(
        concentrations=c,
        switch_times=t,
        volume=v,
        gain=(v_single - v) / v_single,
        rank=float(np.max(c[:-1] - c[1:])),
        converged=converged,
        iterations=counter[0],
        starts_agreeing=agree,
    )


# ---------------------------------------------------------------------------
# Exhaustive oracle


def _scan_grid(model, grid_step):
    lo, hi = model.c_min, model.c_max
    cells = max(2, round((hi - lo) / grid_step))
    return lo + np.arange(cells + 1) * ((hi - lo) / cells)


def _tfe_scan_inputs(model, grid):
    spec = model._kernel
    if spec is not None:
        integrals = _pykernel_intervals(model, grid)
    else:
        integrals = np.array(
            [
                _kernels.integrate_callable(model.mobility, grid[i], grid[i + 1])
                for i in range(grid.size - 1)
            ]
        )
    prefix = np.concatenate(([0.0], np.cumsum(integrals)))
    return prefix, model.mobility(model.c_max)


def _pykernel_intervals(model, grid):
    from ._kernels import _pykernels

    spec = model._kernel
    return _pykernels.interval_mobility_integrals(
        *spec, model.permeability, grid[:-1], grid[1:]
    )


def two_slug_scan(fingering, model, grid_step=1e-3):
    """Volumes of every two-slug partition on a uniform interior grid.

    Returns (interior_grid, volumes); used by the oracle and by the
    structural check that hunts for an improving interior split.
    """
    grid = _scan_grid(model, grid_step)
    if isinstance(fingering, TransverseFlowEquilibrium):
        prefix, m_top = _tfe_scan_inputs(model, grid)
        vols = _kernels.scan_two_tfe(grid, prefix, m_top)
    else:
        mob = np.asarray(model.mobility(grid), dtype=float)
        fspec = fingering.flux._kernel
        if fspec is not None:
            vols = _kernels.scan_two_gk(*fspec, grid, mob)
        else:
            vols = _kernels.scan_two_gk_callable(fingering.flux.value, grid, mob)
    return grid[1:-1].copy(), np.asarray(vols)


def brute_force(fingering, model, n, grid_step=None, options=None):
    """Exhaustive minimum over all n-slug partitions on a uniform grid.

    Only n = 2 and n = 3 are supported; the search space is every
    combination of interior grid nodes, so this is the slow, assumption-free
    oracle against which the optimizer is validated.
    """
    opts = options or OptimizerOptions()
    step = grid_step if grid_step is not None else opts.oracle_grid_step
    lo, hi = model.c_min, model.c_max
    v_single = single_slug_volume(fingering, model)

    if n == 2:
        interior, vols = two_slug_scan(fingering, model, step)
        i = int(np.argmin(vols))
        c = np.array([hi, interior[i], lo])
        evals = interior.size
    elif n == 3:
        grid = _scan_grid(model, step)
        if isinstance(fingering, TransverseFlowEquilibrium):
            prefix, m_top = _tfe_scan_inputs(model, grid)
            _, bi, bj = _kernels.scan_three_tfe(grid, prefix, m_top)
        else:
            mob = np.asarray(model.mobility(grid), dtype=float)
            fspec = fingering.flux._kernel
            if fspec is not None:
                _, bi, bj = _kernels.scan_three_gk(*fspec, grid, mob)
            else:
                _, bi, bj = _kernels.scan_three_gk_callable(
                    fingering.flux.value, grid, mob
                )
        c = np.array([hi, grid[bi], grid[bj], lo])
        m = grid.size - 2
        evals = m * (m - 1) // 2
    else:
        raise ValueError(f"exhaustive search supports n in {{2, 3}}, got {n}")

    t = breakthrough_times(fingering, model, c)
    v = volume(c, t)
    return OptimizationResult(
        concentrations=c,
        switch_times=t,
        volume=v,
        gain=(v_single - v) / v_single,
        rank=float(np.max(c[:-1] - c[1:])),
        converged=True,
        iterations=evals,
        starts_agreeing=1,
    )


# ---------------------------------------------------------------------------
# Limiting profile


def limiting_beta(fingering):
    """Exponent of the limiting profile 1 - (mu(c)/mu(c_max))**beta."""
    if isinstance(fingering, TransverseFlowEquilibrium):
        return 1.0
    if isinstance(fingering, GeneralizedKoval):
        return -2.0 * fingering.flux.derivative_at_one()
    raise TypeError(f"unsupported fingering model: {fingering!r}")


@dataclass(frozen=True)
class LimitingProfile:
    """Refinement limit of the optimal step profiles."""

    fingering: object
    model: object
    beta: float
    limiting_volume: float
    limiting_gain: float

    def profile(self, c):
        """Limiting switch-time profile at concentration(s) c."""
        mu_top = self.model.viscosity(self.model.c_max)
        ratio = np.asarray(self.model.viscosity(c), dtype=float) / mu_top
        out = 1.0 - ratio**self.beta
        return float(out) if np.isscalar(c) else out


def limiting_profile(fingering, model):
    beta = limiting_beta(fingering)
    mu_top = model.viscosity(model.c_max)

    def t_inf(c):
        return 1.0 - (model.viscosity(c) / mu_top) ** beta

    inner = _kernels.integrate_callable(t_inf, model.c_min, model.c_max, rel_tol=1e-10)
    v_inf = inner + model.c_min
    v_single = single_slug_volume(fingering, model)
    return LimitingProfile(
        fingering=fingering,
        model=model,
        beta=beta,
        limiting_volume=v_inf,
        limiting_gain=(v_single - v_inf) / v_single,
    )


# ---------------------------------------------------------------------------
# Partition refinement and convergence


def refine_partition(fingering, model, config):
    """Insert one concentration into the widest slab if that lowers the
    volume; returns the original configuration when no interior insertion
    improves it.  Apparent improvements at roundoff scale are treated as
    none, so a configuration that is only matched (never beaten) by interior
    insertions comes back unchanged."""
    c = np.asarray(config.concentrations, dtype=float)
    gaps = c[:-1] - c[1:]
    k = int(np.argmax(gaps))
    lo, hi = c[k + 1], c[k]
    evaluate = _volume_evaluator(fingering, model)
    v_old = evaluate(c)

    def inserted(x):
        return evaluate(np.insert(c, k + 1, x))

    margin = 1e-12 * (model.c_max - model.c_min)
    coarse = np.linspace(lo + margin, hi - margin, 65)
    coarse_v = np.array([inserted(x) for x in coarse])
    i = int(np.argmin(coarse_v))
    a = coarse[max(0, i - 1)]
    b = coarse[min(coarse.size - 1, i + 1)]
    x_best, v_best = _golden_min(inserted, a, b, 1e-10)
    if v_best < v_old - 1e-13 * max(1.0, abs(v_old)):
        refined = np.insert(c, k + 1, x_best)
        return SlugConfiguration(
            refined, breakthrough_times(fingering, model, refined)
        )
    return config


@dataclass(frozen=True)
class ConvergencePoint:
    n: int
    volume: float
    gain: float
    rank: float
    sup_distance: float
    converged: bool


def convergence_study(fingering, model, slug_counts, options=None):
    """Optimal profiles against the limiting profile for growing n.

    For each slug count: optimize, then measure the uniform distance between
    the optimal step profile and the limiting profile on a dense grid.  Both
    the distance and the partition rank shrink toward zero as n grows.
    """
    counts = list(slug_counts)
    if not counts or any(
        not isinstance(v, (int, np.integer)) or v < 1 for v in counts
    ):
        raise ValueError("slug_counts must be positive integers")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("slug_counts must be strictly increasing")

    limit = limiting_profile(fingering, model)
    grid = np.linspace(model.c_min, model.c_max, 10_001)
    limit_vals = limit.profile(grid)

    points = []
    for n in counts:
        res = optimize(fingering, model, n, options)
        prof = profile_of(res.configuration)
        sup = float(np.max(np.abs(prof(grid) - limit_vals)))
        points.append(
            ConvergencePoint(
                n=int(n),
                volume=res.volume,
                gain=res.gain,
                rank=res.rank,
                sup_distance=sup,
                converged=res.converged,
            )
        )
    return points
