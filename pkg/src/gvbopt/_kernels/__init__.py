"""Kernel backend selection.

Imports the compiled Cython kernels when they are available and falls back to
the pure NumPy implementation otherwise.  Set ``GVBOPT_PURE_PYTHON=1`` to
force the fallback (useful for benchmarking and debugging).
"""

import os

from . import _pykernels
from ._pykernels import (
    FLUX_KOVAL,
    FLUX_POWER_LAW,
    VISC_CUBIC_POWER,
    VISC_EXPONENTIAL,
    VISC_LINEAR,
    flux_values,
    integrate_callable,
    scan_three_gk_callable,
    scan_two_gk_callable,
    viscosity_values,
)

_forced_pure = os.environ.get("GVBOPT_PURE_PYTHON", "").strip() not in ("", "0")

if _forced_pure:
    _impl = _pykernels
    COMPILED = False
else:
    try:
        from . import _core as _impl

        COMPILED = True
    except ImportError:
        _impl = _pykernels
        COMPILED = False

mobility_integral = _impl.mobility_integral
times_tfe = _impl.times_tfe
times_gk = _impl.times_gk
partition_volume_tfe = _impl.partition_volume_tfe
partition_volume_gk = _impl.partition_volume_gk
scan_two_tfe = _impl.scan_two_tfe
scan_three_tfe = _impl.scan_three_tfe
scan_two_gk = _impl.scan_two_gk
scan_three_gk = _impl.scan_three_gk


def backend_name():
    return "compiled" if COMPILED else "python"
