"""Scenario files: JSON descriptions of a design study.

A scenario names one viscosity curve, the fingering models to compare, the
slug counts to optimize, and optional optimizer controls.  Model specs are
compact strings: "tfe", "koval[:alpha]", "tl[:omega]", "naive".  Unknown or
malformed fields are rejected by name so a typo never silently changes a
study.
"""

import json
from dataclasses import dataclass, fields, replace
from typing import Optional

from .fluids import (
    ExponentialViscosity,
    GeneralizedKoval,
    KovalFlux,
    LinearViscosity,
    PowerCubicViscosity,
    TabulatedViscosity,
    TFE,
    ToddLongstaffFlux,
)
from .optimizer import OptimizerOptions

DEFAULT_MODELS = ("tfe", "koval:0.22", "tl:0.6667", "naive")
DEFAULT_SLUG_COUNTS = (2, 3, 4, 5, 10)

_DEFAULT_ALPHA = 0.22
_DEFAULT_OMEGA = 0.6667


class ScenarioError(ValueError):
    """A scenario file could not be interpreted."""


@dataclass(frozen=True)
class Scenario:
    viscosity: object
    models: tuple
    slug_counts: tuple
    optimizer: OptimizerOptions
    output_dir: Optional[str] = None

    @property
    def model_labels(self):
        return tuple(m.label for m in self.models)

    def to_dict(self):
        return {
            "viscosity": _viscosity_to_dict(self.viscosity),
            "models": list(self.model_labels),
            "slug_counts": list(self.slug_counts),
            "optimizer": _optimizer_to_dict(self.optimizer),
            **({"output_dir": self.output_dir} if self.output_dir else {}),
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def parse_model_spec(text):
    """Parse a fingering-model spec string."""
    if not isinstance(text, str):
        raise ScenarioError(f"model spec must be a string, got {text!r}")
    spec = text.strip().lower()
    name, _, arg = spec.partition(":")
    if name == "tfe":
        if arg:
            raise ScenarioError("model 'tfe' takes no parameter")
        return TFE
    if name == "naive":
        if arg:
            raise ScenarioError("model 'naive' takes no parameter")
        return GeneralizedKoval(ToddLongstaffFlux(1.0))
    if name in ("koval", "tl"):
        default = _DEFAULT_ALPHA if name == "koval" else _DEFAULT_OMEGA
        try:
            value = float(arg) if arg else default
        except ValueError:
            raise ScenarioError(f"bad parameter in model spec '{text}'") from None
        try:
            flux = KovalFlux(value) if name == "koval" else ToddLongstaffFlux(value)
        except ValueError as exc:
            raise ScenarioError(f"model spec '{text}': {exc}") from None
        return GeneralizedKoval(flux)
    raise ScenarioError(f"unknown model spec '{text}'")


def _require(data, key, where):
    if key not in data:
        raise ScenarioError(f"{where} is missing '{key}'")
    return data[key]


def _reject_extras(data, allowed, where):
    extras = set(data) - set(allowed)
    if extras:
        raise ScenarioError(f"unknown {where} keys: {sorted(extras)}")


def _number(data, key, where):
    value = _require(data, key, where)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{where} field '{key}' must be a number, got {value!r}")
    return float(value)


def _parse_viscosity(data):
    if not isinstance(data, dict):
        raise ScenarioError("'viscosity' must be an object")
    kind = _require(data, "kind", "viscosity")
    shared = {}
    for key in ("c_min", "c_max", "permeability"):
        if key in data:
            shared[key] = _number(data, key, "viscosity")
    try:
        if kind == "linear":
            _reject_extras(
                data, ("kind", "mu0", "slope", "c_min", "c_max", "permeability"),
                "viscosity",
            )
            return LinearViscosity(
                _number(data, "mu0", "viscosity"),
                _number(data, "slope", "viscosity"),
                **shared,
            )
        if kind == "exponential":
            _reject_extras(
                data, ("kind", "mu0", "rate_ln", "c_min", "c_max", "permeability"),
                "viscosity",
            )
            return ExponentialViscosity(
                _number(data, "mu0", "viscosity"),
                _number(data, "rate_ln", "viscosity"),
                **shared,
            )
        if kind == "power_cubic":
            _reject_extras(
                data, ("kind", "scale", "exponent", "c_min", "c_max", "permeability"),
                "viscosity",
            )
            return PowerCubicViscosity(
                _number(data, "scale", "viscosity"),
                _number(data, "exponent", "viscosity"),
                **shared,
            )
        if kind == "tabulated":
            _reject_extras(
                data,
                ("kind", "path", "concentrations", "viscosities", "permeability"),
                "viscosity",
            )
            perm = shared.get("permeability", 1.0)
            if "path" in data:
                if "concentrations" in data or "viscosities" in data:
                    raise ScenarioError(
                        "tabulated viscosity takes 'path' or inline points, not both"
                    )
                return TabulatedViscosity.from_csv(data["path"], permeability=perm)
            if "concentrations" in data and "viscosities" in data:
                return TabulatedViscosity(
                    data["concentrations"], data["viscosities"], permeability=perm
                )
            raise ScenarioError(
                "tabulated viscosity needs 'path' or both "
                "'concentrations' and 'viscosities'"
            )
    except ScenarioError:
        raise
    except (ValueError, OSError) as exc:
        raise ScenarioError(f"viscosity: {exc}") from exc
    raise ScenarioError(f"unknown viscosity kind '{kind}'")


def _viscosity_to_dict(model):
    if isinstance(model, LinearViscosity):
        body = {"kind": "linear", "mu0": model.mu0, "slope": model.slope}
    elif isinstance(model, ExponentialViscosity):
        body = {"kind": "exponential", "mu0": model.mu0, "rate_ln": model.rate_ln}
    elif isinstance(model, PowerCubicViscosity):
        body = {"kind": "power_cubic", "scale": model.scale, "exponent": model.exponent}
    elif isinstance(model, TabulatedViscosity):
        return {
            "kind": "tabulated",
            "concentrations": list(model.concentrations),
            "viscosities": list(model.viscosities),
            "permeability": model.permeability,
        }
    else:
        raise TypeError(f"cannot serialize viscosity model {model!r}")
    body.update(
        c_min=model.c_min, c_max=model.c_max, permeability=model.permeability
    )
    return body


_OPTIMIZER_KEYS = tuple(f.name for f in fields(OptimizerOptions))


def _parse_optimizer(data):
    if not isinstance(data, dict):
        raise ScenarioError("'optimizer' must be an object")
    _reject_extras(data, _OPTIMIZER_KEYS, "optimizer")
    kwargs = {}
    for key, value in data.items():
        if key == "initial_step" and value is None:
            kwargs[key] = None
            continue
        if key in ("multi_starts", "max_iterations", "rng_seed"):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ScenarioError(f"optimizer field '{key}' must be an integer")
            kwargs[key] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ScenarioError(f"optimizer field '{key}' must be a number")
            kwargs[key] = float(value)
    try:
        return OptimizerOptions(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"optimizer: {exc}") from exc


def _optimizer_to_dict(opts):
    return {f.name: getattr(opts, f.name) for f in fields(OptimizerOptions)}


def scenario_from_dict(data):
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    _reject_extras(
        data,
        ("viscosity", "models", "slug_counts", "optimizer", "output_dir"),
        "scenario",
    )
    viscosity = _parse_viscosity(_require(data, "viscosity", "scenario"))

    specs = data.get("models", list(DEFAULT_MODELS))
    if not isinstance(specs, list) or not specs:
        raise ScenarioError("'models' must be a non-empty list of model specs")
    models = tuple(parse_model_spec(s) for s in specs)

    counts = data.get("slug_counts", list(DEFAULT_SLUG_COUNTS))
    if not isinstance(counts, list) or not counts:
        raise ScenarioError("'slug_counts' must be a non-empty list of integers")
    for v in counts:
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ScenarioError(f"slug count must be a positive integer, got {v!r}")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ScenarioError("'slug_counts' must be strictly increasing")

    opts = _parse_optimizer(data.get("optimizer", {}))

    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ScenarioError("'output_dir' must be a string")

    return Scenario(
        viscosity=viscosity,
        models=models,
        slug_counts=tuple(counts),
        optimizer=opts,
        output_dir=output_dir,
    )


def parse_scenario(path):
    """Load and validate a scenario JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def with_seed(scenario, seed):
    """Scenario with the optimizer seed replaced."""
    if seed is None:
        return scenario
    return replace(
        scenario, optimizer=replace(scenario.optimizer, rng_seed=int(seed))
    )
