"""Volume-correlation subspace detector (Python bindings)."""

from ._core import (
    DegenerateGeometryError,
    InputError,
    IoError,
    SingularInputError,
    UsageError,
    bound,
    detect,
    draw_samples,
    elementary_symmetric,
    incremental_volume_factor,
    log_volume,
    make_scenario,
    noiseless_breakpoint,
    orthonormalize,
    principal_angles,
    simulate,
    tau,
    volume,
    volume_correlation,
)

__all__ = [
    "DegenerateGeometryError",
    "InputError",
    "IoError",
    "SingularInputError",
    "UsageError",
    "bound",
    "detect",
    "draw_samples",
    "elementary_symmetric",
    "incremental_volume_factor",
    "log_volume",
    "make_scenario",
    "noiseless_breakpoint",
    "orthonormalize",
    "principal_angles",
    "simulate",
    "tau",
    "volume",
    "volume_correlation",
]
