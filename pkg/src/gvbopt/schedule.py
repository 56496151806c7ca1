"""Slug schedules, breakthrough times, and injected volume.

An n-slug schedule injects concentrations c_1 > c_2 > ... > c_{n+1} on the
time intervals [T_0, T_1], ..., [T_n, T_{n+1}] with T_0 = 0 and T_{n+1} = 1
(the final interval carries the chase fluid).  Each concentration step grows
a mixing zone whose edges move with speeds given by the fingering model; a
schedule is admissible when no zone's leading edge overtakes the outlet
before the pore volume is injected.  Switch times chosen so the no-overtake
constraints hold with equality minimize the injected polymer volume for the
given concentration partition.
"""

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .fluids import GeneralizedKoval, TransverseFlowEquilibrium, mean_mobility

_TIME_TOL = 1e-9
_FEAS_TOL = 1e-10


def _as_partition(concentrations):
    c = np.asarray(concentrations, dtype=float)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need a 1-D concentration vector with at least 2 entries")
    if np.any(np.diff(c) >= 0.0):
        raise ValueError("concentrations must be strictly decreasing")
    return c


@dataclass(frozen=True, eq=False)
class SlugConfiguration:
    """A concentration partition together with its switch times."""

    concentrations: np.ndarray
    switch_times: np.ndarray

    def __post_init__(self):
        c = _as_partition(self.concentrations)
        t = np.asarray(self.switch_times, dtype=float)
        if t.shape != c.shape:
            raise ValueError(
                f"switch_times length {t.size} does not match "
                f"concentrations length {c.size}"
            )
        if abs(t[-1] - 1.0) > _TIME_TOL:
            raise ValueError(f"final switch time must be 1, got {t[-1]!r}")
        t = t.copy()
        t[-1] = 1.0
        if t[0] <= 0.0:
            raise ValueError("the first slug must have positive duration")
        if np.any(np.diff(t) < 0.0) or np.any(t < 0.0):
            raise ValueError("switch times must be non-decreasing in [0, 1]")
        c = c.copy()
        c.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "concentrations", c)
        object.__setattr__(self, "switch_times", t)

    @property
    def n(self):
        return self.concentrations.size - 1

    @property
    def durations(self):
        """Per-slug injection durations t_j = T_j - T_{j-1}, length n+1."""
        return np.diff(np.concatenate(([0.0], self.switch_times)))

    def as_dict(self):
        return {
            "concentrations": [float(v) for v in self.concentrations],
            "switch_times": [float(v) for v in self.switch_times],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data):
        extras = set(data) - {"concentrations", "switch_times"}
        if extras:
            raise ValueError(f"unknown configuration keys: {sorted(extras)}")
        for key in ("concentrations", "switch_times"):
            if key not in data:
                raise ValueError(f"configuration is missing '{key}'")
        return cls(
            np.asarray(data["concentrations"], dtype=float),
            np.asarray(data["switch_times"], dtype=float),
        )

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class EdgeVelocities:
    """Leading (front) and trailing (back) mixing-zone edge speeds."""

    front: float
    back: float

    def __post_init__(self):
        if not (self.front >= 1.0 >= self.back > 0.0):
            raise ValueError(
                f"edge speeds must satisfy front >= 1 >= back > 0, "
                f"got front={self.front}, back={self.back}"
            )


def edge_velocities(fingering, model, c_hi, c_lo):
    """Mixing-zone edge speeds for the step from c_hi down to c_lo."""
    if not c_hi > c_lo:
        raise ValueError(f"need c_hi > c_lo, got {c_hi} <= {c_lo}")
    if isinstance(fingering, TransverseFlowEquilibrium):
        mbar = mean_mobility(model, c_lo, c_hi)
        return EdgeVelocities(
            front=mbar / model.mobility(c_hi), back=mbar / model.mobility(c_lo)
        )
    if isinstance(fingering, GeneralizedKoval):
        ratio = model.viscosity(c_hi) / model.viscosity(c_lo)
        f = float(fingering.flux.value(ratio))
        return EdgeVelocities(front=1.0 / f, back=f)
    raise TypeError(f"unsupported fingering model: {fingering!r}")


def zone_velocities(fingering, model, concentrations):
    """Edge speeds for every zone of a partition, in injection order."""
    c = _as_partition(concentrations)
    return [
        edge_velocities(fingering, model, c[j], c[j + 1]) for j in range(c.size - 1)
    ]


def _times_product(fingering, model, c):
    velocities = zone_velocities(fingering, model, c)
    t = np.empty(c.size)
    ratio = 1.0
    prev_back = 1.0
    for j, v in enumerate(velocities):
        ratio *= prev_back / v.front
        t[j] = 1.0 - ratio
        prev_back = v.back
    t[-1] = 1.0
    return t


def _times_closed(fingering, model, c):
    if isinstance(fingering, TransverseFlowEquilibrium):
        spec = model._kernel
        if spec is not None:
            return _kernels.times_tfe(*spec, model.permeability, c)
        m_top = model.mobility(c[0])
        t = np.empty(c.size)
        for j in range(c.size - 1):
            t[j] = 1.0 - m_top / mean_mobility(model, c[j + 1], c[j])
        t[-1] = 1.0
        return t
    if isinstance(fingering, GeneralizedKoval):
        spec = model._kernel
        fspec = fingering.flux._kernel
        if spec is not None and fspec is not None:
            return _kernels.times_gk(*fspec, *spec, model.permeability, c)
        mu = np.asarray(model.viscosity(c), dtype=float)
        f = np.asarray(fingering.flux.value(mu[:-1] / mu[1:]), dtype=float)
        lead = np.concatenate(([1.0], np.cumprod(f[:-1] ** 2)))
        return np.append(1.0 - f * lead, 1.0)
    raise TypeError(f"unsupported fingering model: {fingering!r}")


def breakthrough_times(fingering, model, concentrations, method="auto"):
    """Switch times that meet every no-breakthrough constraint with equality.

    ``method`` selects the evaluation route: "closed" uses the telescoped
    closed forms, "product" multiplies out the per-zone speed ratios, and
    "auto" (default) is the closed form through the fastest available
    backend.  All routes agree to roundoff; "product" exists as an
    independent cross-check.  Returns length n+1 with the final entry 1.
    """
    c = _as_partition(concentrations)
    model.viscosity(np.array([c[-1], c[0]]))  # domain check
    if method == "auto" or method == "closed":
        return _times_closed(fingering, model, c)
    if method == "product":
        return _times_product(fingering, model, c)
    raise ValueError(f"unknown method {method!r}")


def make_configuration(fingering, model, concentrations):
    """Configuration with equality switch times for the given partition."""
    c = _as_partition(concentrations)
    return SlugConfiguration(c, breakthrough_times(fingering, model, c))


@dataclass(frozen=True)
class FeasibilityReport:
    """Residuals of the no-breakthrough constraints.

    residuals[j] = v_j^b (1 - T_j) - v_{j+1}^f (1 - T_{j+1}) for
    j = 0, ..., n-1 with v_0^b = 1 and T_0 = 0; non-negative (within
    tolerance) means the leading edge of zone j+1 never overtakes the
    trailing edge position required of it.
    """

    residuals: np.ndarray
    tolerance: float

    @property
    def satisfied(self):
        return bool(np.all(self.residuals >= -self.tolerance))

    @property
    def worst(self):
        return float(np.min(self.residuals))


def check_no_breakthrough(fingering, model, config, tolerance=_FEAS_TOL):
    velocities = zone_velocities(fingering, model, config.concentrations)
    t = config.switch_times
    backs = np.array([1.0] + [v.back for v in velocities[:-1]])
    fronts = np.array([v.front for v in velocities])
    remaining = np.concatenate(([1.0], 1.0 - t[:-1]))
    residuals = backs * remaining[:-1] - fronts * remaining[1:]
    return FeasibilityReport(residuals=residuals, tolerance=tolerance)


def volume(concentrations, switch_times):
    """Injected polymer volume of a schedule (pore volumes times
    concentration units)."""
    c = _as_partition(concentrations)
    t = np.asarray(switch_times, dtype=float)
    if t.shape != c.shape:
        raise ValueError("switch_times length does not match concentrations")
    if abs(t[-1] - 1.0) > _TIME_TOL:
        raise ValueError(f"final switch time must be 1, got {t[-1]!r}")
    return float(np.sum((c[:-1] - c[1:]) * t[:-1]) + c[-1] * t[-1])


def gain(volume_single, volume_n):
    """Relative volume saving against the single-slug schedule."""
    if volume_single <= 0.0:
        raise ValueError(f"single-slug volume must be positive, got {volume_single}")
    return (volume_single - volume_n) / volume_single


def single_slug_volume(fingering, model):
    """Volume of the one-slug schedule at full strength."""
    c = np.array([model.c_max, model.c_min])
    t = breakthrough_times(fingering, model, c)
    return volume(c, t)


@dataclass(frozen=True, eq=False)
class InjectionProfile:
    """Injected concentration as a function of switch time, presented as the
    dual step function T(c): for each concentration level c, the time at
    which injection drops below c.  Constant 1 below the partition floor
    (chase fluid switch), 0 above full strength."""

    concentrations: np.ndarray
    plateau_times: np.ndarray
    smooth_form: Optional[Callable] = None

    def __post_init__(self):
        c = _as_partition(self.concentrations)
        t = np.asarray(self.plateau_times, dtype=float)
        if t.size != c.size - 1:
            raise ValueError("need one plateau per slab")
        object.__setattr__(self, "concentrations", c)
        object.__setattr__(self, "plateau_times", t)

    @property
    def c_min(self):
        return float(self.concentrations[-1])

    @property
    def c_max(self):
        return float(self.concentrations[0])

    def __call__(self, c):
        if self.smooth_form is not None:
            return self.smooth_form(c)
        query = np.asarray(c, dtype=float)
        ascending = self.concentrations[::-1]
        idx = np.searchsorted(ascending, query, side="left")
        idx = np.clip(idx, 1, self.concentrations.size - 1)
        vals = self.plateau_times[self.concentrations.size - 1 - idx]
        vals = np.where(query < self.c_min, 1.0, vals)
        vals = np.where(query > self.c_max, 0.0, vals)
        return float(vals) if np.isscalar(c) or query.ndim == 0 else vals

    def integral(self):
        """Integral of the profile over [0, c_max]; equals the volume."""
        if self.smooth_form is not None:
            from ._kernels import integrate_callable

            inner = integrate_callable(
                self.smooth_form, self.c_min, self.c_max, rel_tol=1e-10
            )
            return inner + self.c_min
        c = self.concentrations
        return float(np.sum((c[:-1] - c[1:]) * self.plateau_times) + self.c_min)

    def staircase(self):
        """Corner points of the step graph, ascending in c."""
        c = self.concentrations
        t = self.plateau_times
        pts = [(float(c[-1]), float(t[-1]))]
        for j in range(c.size - 2, -1, -1):
            pts.append((float(c[j]), float(t[j])))
            if j > 0:
                pts.append((float(c[j]), float(t[j - 1])))
        return pts

    def to_csv(self, path, samples=None):
        """Write the profile as CSV rows ``c,T`` ascending in c.

        Step profiles dump their corner points; smooth profiles are sampled
        (default 1001 points).
        """
        with open(path, "w") as fh:
            fh.write("c,T\n")
            if self.smooth_form is None and samples is None:
                for cc, tt in self.staircase():
                    fh.write(f"{cc:.12g},{tt:.12g}\n")
            else:
                count = samples or 1001
                grid = np.linspace(self.c_min, self.c_max, count)
                vals = self(grid)
                for cc, tt in zip(grid, vals):
                    fh.write(f"{cc:.12g},{tt:.12g}\n")


def profile_of(config):
    """Injection profile of a configuration."""
    return InjectionProfile(
        concentrations=config.concentrations,
        plateau_times=config.switch_times[:-1],
    )
