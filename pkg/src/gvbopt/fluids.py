"""Fluid descriptions for graded viscosity bank design.

A polymer solution is characterized by a viscosity curve ``mu(c)`` that is
positive and strictly increasing on the working concentration range, together
with a rock permeability ``k``; the mobility is ``m(c) = k / mu(c)``.  The
mixing-zone growth at a concentration step is described by a fingering model:
either transverse flow equilibrium (edge speeds from mean mobilities) or a
generalized Koval model built on a flux factor ``f(x)`` of the viscosity
ratio across the step.
"""

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import _kernels

_DOMAIN_SLACK = 1e-12
_UNIT_TOL = 1e-12
_CONDITION_TOL = 1e-9


# ---------------------------------------------------------------------------
# Viscosity models


class _ViscosityBase:
    """Shared behaviour for concrete viscosity curves."""

    @property
    def _kernel(self):
        """(code, p0, p1) triple for the kernel backend, or None."""
        return None

    def _mu_raw(self, c):
        raise NotImplementedError

    def _check_range(self):
        if not 0.0 <= self.c_min < self.c_max:
            raise ValueError(
                f"concentration range must satisfy 0 <= c_min < c_max, "
                f"got [{self.c_min}, {self.c_max}]"
            )
        if not self.permeability > 0.0:
            raise ValueError(f"permeability must be positive, got {self.permeability}")
        grid = np.linspace(self.c_min, self.c_max, 1001)
        mu = np.asarray(self._mu_raw(grid), dtype=float)
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
            raise ValueError("viscosity must be finite and positive on the domain")
        if np.any(np.diff(mu) <= 0.0):
            raise ValueError("viscosity must be strictly increasing on the domain")

    def viscosity(self, c):
        """Viscosity at concentration(s) ``c``; raises outside the domain."""
        arr = np.asarray(c, dtype=float)
        if np.any(arr < self.c_min - _DOMAIN_SLACK) or np.any(
            arr > self.c_max + _DOMAIN_SLACK
        ):
            raise ValueError(
                f"concentration outside [{self.c_min}, {self.c_max}]"
            )
        mu = self._mu_raw(np.clip(arr, self.c_min, self.c_max))
        return float(mu) if np.isscalar(c) or arr.ndim == 0 else mu

    def mobility(self, c):
        """Mobility k/mu at concentration(s) ``c``."""
        mu = self.viscosity(c)
        return self.permeability / mu


@dataclass(frozen=True)
class LinearViscosity(_ViscosityBase):
    """mu(c) = mu0 + slope * c."""

    mu0: float
    slope: float
    c_min: float = 0.0
    c_max: float = 1.0
    permeability: float = 1.0

    def __post_init__(self):
        if self.slope <= 0.0:
            raise ValueError(f"slope must be positive, got {self.slope}")
        self._check_range()

    @property
    def _kernel(self):
        return (_kernels.VISC_LINEAR, self.mu0, self.slope)

    def _mu_raw(self, c):
        return self.mu0 + self.slope * c


@dataclass(frozen=True)
class ExponentialViscosity(_ViscosityBase):
    """mu(c) = mu0 * exp(rate_ln * c).

    ``rate_ln`` is the log of the total thickening factor per unit
    concentration; rate_ln = ln(10) gives a tenfold increase over [0, 1].
    """

    mu0: float
    rate_ln: float
    c_min: float = 0.0
    c_max: float = 1.0
    permeability: float = 1.0

    def __post_init__(self):
        if self.rate_ln <= 0.0:
            raise ValueError(f"rate_ln must be positive, got {self.rate_ln}")
        self._check_range()

    @property
    def _kernel(self):
        return (_kernels.VISC_EXPONENTIAL, self.mu0, self.rate_ln)

    def _mu_raw(self, c):
        return self.mu0 * np.exp(self.rate_ln * c)


@dataclass(frozen=True)
class PowerCubicViscosity(_ViscosityBase):
    """mu(c) = scale * (1 + c**3) ** exponent."""

    scale: float
    exponent: float
    c_min: float = 0.0
    c_max: float = 1.0
    permeability: float = 1.0

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.exponent <= 0.0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")
        self._check_range()

    @property
    def _kernel(self):
        return (_kernels.VISC_CUBIC_POWER, self.scale, self.exponent)

    def _mu_raw(self, c):
        return self.scale * (1.0 + np.asarray(c, dtype=float) ** 3) ** self.exponent


@dataclass(frozen=True)
class TabulatedViscosity(_ViscosityBase):
    """Monotone cubic interpolant through measured (c, mu) points.

    Needs at least four points with strictly increasing c and mu.  The domain
    is the tabulated concentration range.
    """

    concentrations: tuple
    viscosities: tuple
    permeability: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "concentrations", tuple(float(v) for v in self.concentrations)
        )
        object.__setattr__(
            self, "viscosities", tuple(float(v) for v in self.viscosities)
        )
        c = np.asarray(self.concentrations)
        mu = np.asarray(self.viscosities)
        if c.size != mu.size:
            raise ValueError("concentrations and viscosities must have equal length")
        if c.size < 4:
            raise ValueError(f"need at least 4 table points, got {c.size}")
        if np.any(np.diff(c) <= 0.0):
            raise ValueError("table concentrations must be strictly increasing")
        if np.any(np.diff(mu) <= 0.0) or mu[0] <= 0.0:
            raise ValueError("table viscosities must be positive and strictly increasing")
        self._check_range()

    @property
    def c_min(self):
        return self.concentrations[0]

    @property
    def c_max(self):
        return self.concentrations[-1]

    @cached_property
    def _interp(self):
        return PchipInterpolator(
            np.asarray(self.concentrations), np.asarray(self.viscosities)
        )

    def _mu_raw(self, c):
        return self._interp(np.asarray(c, dtype=float))

    @classmethod
    def from_csv(cls, path, permeability=1.0):
        """Load a two-column CSV with header ``c,mu``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["c", "mu"]:
                raise ValueError(f"expected CSV header 'c,mu' in {path}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        if not rows:
            raise ValueError(f"no data rows in {path}")
        c, mu = zip(*rows)
        return cls(c, mu, permeability=permeability)


ViscosityModel = Union[
    LinearViscosity, ExponentialViscosity, PowerCubicViscosity, TabulatedViscosity
]


def viscosity(model, c):
    return model.viscosity(c)


def mobility(model, c):
    return model.mobility(c)


def mean_mobility(model, a, b):
    """Average mobility over the concentration interval between a and b.

    The order of the endpoints does not matter; a degenerate interval is an
    error.  The result always lies strictly between the endpoint mobilities.
    """
    lo, hi = (a, b) if a <= b else (b, a)
    if lo == hi:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    model.viscosity(np.array([lo, hi]))  # domain check
    spec = model._kernel
    if spec is not None:
        integral = _kernels.mobility_integral(*spec, model.permeability, lo, hi)
    else:
        integral = _kernels.integrate_callable(model.mobility, lo, hi)
    return integral / (hi - lo)


def concentration_at_viscosity(model, target):
    """Invert the viscosity curve: the c in the domain with mu(c) = target."""
    mu_lo = model.viscosity(model.c_min)
    mu_hi = model.viscosity(model.c_max)
    if not mu_lo <= target <= mu_hi:
        raise ValueError(
            f"target viscosity {target} outside [{mu_lo}, {mu_hi}]"
        )
    if target == mu_lo:
        return model.c_min
    if target == mu_hi:
        return model.c_max
    return brentq(
        lambda c: model.viscosity(c) - target, model.c_min, model.c_max, xtol=1e-14
    )


# ---------------------------------------------------------------------------
# Flux factors


def _check_unit(value):
    if abs(value - 1.0) > _UNIT_TOL:
        raise ValueError(f"flux factor must satisfy f(1) = 1, got f(1) = {value!r}")


def _check_ratio_domain(x):
    if np.any(np.asarray(x) < 1.0 - _DOMAIN_SLACK):
        raise ValueError("flux factor argument must be a viscosity ratio >= 1")


@dataclass(frozen=True)
class KovalFlux:
    """Koval-type flux factor f(x) = (alpha x^{1/4} + 1 - alpha)^{-4}."""

    alpha: float = 0.22

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")

    @property
    def label(self):
        return f"koval:{self.alpha:g}"

    @property
    def _kernel(self):
        return (_kernels.FLUX_KOVAL, self.alpha)

    def value(self, x):
        _check_ratio_domain(x)
        out = _kernels.flux_values(*self._kernel, x)
        return float(out) if np.isscalar(x) else out

    def derivative_at_one(self):
        return -self.alpha


@dataclass(frozen=True)
class ToddLongstaffFlux:
    """Power-law flux factor f(x) = x^{-omega}, 0 < omega <= 1.

    omega = 1 reproduces the naive Koval rule (edge speeds equal to the
    endpoint viscosity ratio powers).
    """

    omega: float = 2.0 / 3.0

    def __post_init__(self):
        if not 0.0 < self.omega <= 1.0:
            raise ValueError(f"omega must be in (0, 1], got {self.omega}")

    @property
    def label(self):
        return "naive" if self.omega == 1.0 else f"tl:{self.omega:g}"

    @property
    def _kernel(self):
        return (_kernels.FLUX_POWER_LAW, self.omega)

    def value(self, x):
        _check_ratio_domain(x)
        out = _kernels.flux_values(*self._kernel, x)
        return float(out) if np.isscalar(x) else out

    def derivative_at_one(self):
        return -self.omega


def naive_koval():
    """Flux factor with both edge speeds set by the raw viscosity ratio."""
    return ToddLongstaffFlux(omega=1.0)


@dataclass(frozen=True)
class CustomFlux:
    """User-supplied flux factor.

    ``func`` maps a scalar ratio x >= 1 to f(x); it must satisfy f(1) = 1.
    The derivative at 1 is estimated with a one-sided second-order stencil.
    """

    func: Callable[[float], float]
    name: str = "custom"

    def __post_init__(self):
        try:
            at_one = float(self.func(1.0))
        except Exception as exc:
            raise ValueError(f"flux factor evaluation failed at x=1: {exc}") from exc
        _check_unit(at_one)

    @property
    def label(self):
        return self.name

    @property
    def _kernel(self):
        return None

    def value(self, x):
        _check_ratio_domain(x)
        if np.isscalar(x) or np.asarray(x).ndim == 0:
            return float(self.func(max(float(x), 1.0)))
        flat = np.asarray(x, dtype=float)
        return np.array([float(self.func(max(v, 1.0))) for v in flat.ravel()]).reshape(
            flat.shape
        )

    def derivative_at_one(self):
        h = 1e-6
        try:
            f0 = float(self.func(1.0))
            f1 = float(self.func(1.0 + h))
            f2 = float(self.func(1.0 + 2.0 * h))
        except Exception as exc:
            raise ValueError(f"flux factor evaluation failed near x=1: {exc}") from exc
        d = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
        # a valid flux factor is non-increasing, so clip stencil noise
        return min(d, 0.0)


FluxFactor = Union[KovalFlux, ToddLongstaffFlux, CustomFlux]


def flux_value(flux, x):
    return flux.value(x)


def flux_derivative_at_one(flux):
    return flux.derivative_at_one()


# ---------------------------------------------------------------------------
# Fingering models


@dataclass(frozen=True)
class TransverseFlowEquilibrium:
    """Mixing-zone edge speeds from mean mobilities across the step."""

    @property
    def label(self):
        return "tfe"


@dataclass(frozen=True)
class GeneralizedKoval:
    """Mixing-zone edge speeds from a flux factor of the viscosity ratio."""

    flux: FluxFactor

    @property
    def label(self):
        return self.flux.label


TFE = TransverseFlowEquilibrium()

FingeringModel = Union[TransverseFlowEquilibrium, GeneralizedKoval]


# ---------------------------------------------------------------------------
# Structural conditions on a flux factor


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    satisfied: bool
    worst_violation: float
    witness: tuple
    detail: str = ""


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the four structural checks a flux factor should satisfy
    for the slug design theory to apply: (A) finite smooth values, (B) unit
    value at 1 with positive decreasing profile, (C) submultiplicativity
    f(xy) <= f(x) f(y), and (D) convexity of c -> f(m(c')/m(c)) for every
    anchor c' in the concentration domain."""

    checks: tuple

    def __iter__(self):
        return iter(self.checks)

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def all_satisfied(self):
        return all(check.satisfied for check in self.checks)

    def summary(self):
        lines = []
        for check in self.checks:
            status = "ok" if check.satisfied else "VIOLATED"
            line = f"({check.name}) {status}: worst violation {check.worst_violation:.3e}"
            if check.detail:
                line += f" ({check.detail})"
            lines.append(line)
        return "\n".join(lines)


def validate_conditions(flux, model, grid_size=128):
    """Check conditions (A) through (D) for ``flux`` on the ratio range
    induced by ``model``.  Grid-based: violations smaller than the grid can
    resolve may be missed, which is why ``grid_size`` of at least 64 is
    required."""
    if grid_size < 64:
        raise ValueError(f"grid_size must be at least 64, got {grid_size}")

    ratio_max = model.viscosity(model.c_max) / model.viscosity(model.c_min)
    x_grid = np.linspace(1.0, ratio_max, grid_size)
    f_grid = np.asarray(flux.value(x_grid), dtype=float)

    # (A) finite evaluability of f and of the mobility over the ranges used
    c_grid = np.linspace(model.c_min, model.c_max, grid_size)
    mob = np.asarray(model.mobility(c_grid), dtype=float)
    bad_f = ~np.isfinite(f_grid)
    bad_m = ~np.isfinite(mob) | (mob <= 0.0)
    a_ok = not (bad_f.any() or bad_m.any())
    a_witness = ()
    if bad_f.any():
        a_witness = (float(x_grid[int(np.argmax(bad_f))]),)
    elif bad_m.any():
        a_witness = (float(c_grid[int(np.argmax(bad_m))]),)
    check_a = ConditionCheck(
        "A",
        a_ok,
        0.0 if a_ok else np.inf,
        a_witness,
        detail="finite values on evaluation grids",
    )

    # (B) f(1) = 1, positivity, monotone decrease
    unit_err = abs(float(flux.value(1.0)) - 1.0)
    positivity = max(0.0, -float(np.min(f_grid)))
    increases = np.diff(f_grid)
    mono = float(np.max(increases)) if increases.size else 0.0
    mono_err = max(0.0, mono)
    worst_b = max(unit_err, positivity, mono_err)
    witness_b = ()
    if mono_err > 0.0:
        i = int(np.argmax(increases))
        witness_b = (float(x_grid[i]), float(x_grid[i + 1]))
    check_b = ConditionCheck(
        "B",
        worst_b <= _CONDITION_TOL,
        worst_b,
        witness_b,
        detail="unit value, positivity, monotone decrease",
    )

    # (C) submultiplicativity on pairs with product inside the ratio range
    fa = f_grid[:, None] * f_grid[None, :]
    prod = x_grid[:, None] * x_grid[None, :]
    inside = prod <= ratio_max
    f_prod = np.asarray(flux.value(np.where(inside, prod, 1.0)), dtype=float)
    gaps = np.where(inside, f_prod - fa, -np.inf)
    worst_c = max(0.0, float(np.max(gaps)))
    witness_c = ()
    if worst_c > 0.0:
        i, j = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
        witness_c = (float(x_grid[i]), float(x_grid[j]))
    check_c = ConditionCheck(
        "C",
        worst_c <= _CONDITION_TOL,
        worst_c,
        witness_c,
        detail="f(xy) <= f(x) f(y)",
    )

    # (D) midpoint convexity of c -> f(m(c')/m(c)) on c >= c'
    worst_d = -np.inf
    witness_d = ()
    for a_idx in range(grid_size - 1):
        anchor_mob = mob[a_idx]
        sub = c_grid[a_idx:]
        sub_mob = mob[a_idx:]
        phi = np.asarray(flux.value(anchor_mob / sub_mob), dtype=float)
        mid = 0.5 * (sub[:, None] + sub[None, :])
        phi_mid = np.asarray(
            flux.value(anchor_mob / np.asarray(model.mobility(mid))), dtype=float
        )
        gap = phi_mid - 0.5 * (phi[:, None] + phi[None, :])
        w = float(np.max(gap))
        if w > worst_d:
            worst_d = w
            i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
            witness_d = (float(c_grid[a_idx]), float(sub[i]), float(sub[j]))
    worst_d = max(0.0, worst_d)
    check_d = ConditionCheck(
        "D",
        worst_d <= _CONDITION_TOL,
        worst_d,
        witness_d if worst_d > 0.0 else (),
        detail="midpoint convexity of the mobility-ratio profile",
    )

    return ConditionReport(checks=(check_a, check_b, check_c, check_d))
