"""Sensor network localization landscape toolkit (Python bindings)."""

from ._snl import (
    InvalidInput,
    IoError,
    Objective,
    PreconditionError,
    SolverOptions,
    UnsupportedSize,
    certify,
    check_P1_to_P5,
    delta,
    delta_adjoint,
    minimize,
    preset,
    preset_names,
    rip_lower_bound,
    smallest_gaussian_k,
    sqrtn_threshold,
    sweep,
    sweep_csv,
)

__all__ = [
    "InvalidInput",
    "IoError",
    "Objective",
    "PreconditionError",
    "SolverOptions",
    "UnsupportedSize",
    "certify",
    "check_P1_to_P5",
    "delta",
    "delta_adjoint",
    "minimize",
    "preset",
    "preset_names",
    "rip_lower_bound",
    "smallest_gaussian_k",
    "sqrtn_threshold",
    "sweep",
    "sweep_csv",
]
