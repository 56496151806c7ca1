"""Graded viscosity bank design.

Tools for choosing polymer slug injection schedules that prevent viscous
fingering breakthrough at minimal injected polymer volume: mixing-zone edge
speeds under mean-mobility and generalized Koval models, breakthrough-
constrained switch times, volume-minimal concentration partitions, and the
closed-form limiting profile reached by infinitely fine grading.
"""

from ._kernels import COMPILED, backend_name
from .fluids import (
    ConditionCheck,
    ConditionReport,
    CustomFlux,
    ExponentialViscosity,
    GeneralizedKoval,
    KovalFlux,
    LinearViscosity,
    PowerCubicViscosity,
    TabulatedViscosity,
    TFE,
    ToddLongstaffFlux,
    TransverseFlowEquilibrium,
    concentration_at_viscosity,
    flux_derivative_at_one,
    flux_value,
    mean_mobility,
    mobility,
    naive_koval,
    validate_conditions,
    viscosity,
)
from .optimizer import (
    ConvergencePoint,
    LimitingProfile,
    OptimizationResult,
    OptimizerOptions,
    brute_force,
    convergence_study,
    limiting_beta,
    limiting_profile,
    optimize,
    refine_partition,
    two_slug_scan,
)
from .scenario import (
    Scenario,
    ScenarioError,
    parse_model_spec,
    parse_scenario,
    scenario_from_dict,
)
from .schedule import (
    EdgeVelocities,
    FeasibilityReport,
    InjectionProfile,
    SlugConfiguration,
    breakthrough_times,
    check_no_breakthrough,
    edge_velocities,
    gain,
    make_configuration,
    profile_of,
    single_slug_volume,
    volume,
    zone_velocities,
)

__version__ = "0.1.0"

__all__ = [
    "COMPILED",
    "ConditionCheck",
    "ConditionReport",
    "ConvergencePoint",
    "CustomFlux",
    "EdgeVelocities",
    "ExponentialViscosity",
    "FeasibilityReport",
    "GeneralizedKoval",
    "InjectionProfile",
    "KovalFlux",
    "LimitingProfile",
    "LinearViscosity",
    "OptimizationResult",
    "OptimizerOptions",
    "PowerCubicViscosity",
    "Scenario",
    "ScenarioError",
    "SlugConfiguration",
    "TFE",
    "TabulatedViscosity",
    "ToddLongstaffFlux",
    "TransverseFlowEquilibrium",
    "backend_name",
    "breakthrough_times",
    "brute_force",
    "check_no_breakthrough",
    "concentration_at_viscosity",
    "convergence_study",
    "edge_velocities",
    "flux_derivative_at_one",
    "flux_value",
    "gain",
    "limiting_beta",
    "limiting_profile",
    "make_configuration",
    "mean_mobility",
    "mobility",
    "naive_koval",
    "optimize",
    "parse_model_spec",
    "parse_scenario",
    "profile_of",
    "refine_partition",
    "scenario_from_dict",
    "single_slug_volume",
    "two_slug_scan",
    "validate_conditions",
    "viscosity",
    "volume",
    "zone_velocities",
]
