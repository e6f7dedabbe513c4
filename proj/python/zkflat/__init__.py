"""Flatness-based boundary control for the linear Zakharov-Kuznetsov equation."""

from ._core import (
    GenFunTable,
    GevreyInterpolant,
    Params,
    TransverseBasis,
    borel_interpolate,
    build_table,
    bump,
    bump_deriv,
    check_bound,
    make_basis,
    run_free,
    run_null,
    run_reach,
    sine_analyze,
    sine_synthesize,
    step_deriv,
    table_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "GenFunTable",
    "GevreyInterpolant",
    "Params",
    "TransverseBasis",
    "borel_interpolate",
    "build_table",
    "bump",
    "bump_deriv",
    "check_bound",
    "make_basis",
    "run_free",
    "run_null",
    "run_reach",
    "sine_analyze",
    "sine_synthesize",
    "step_deriv",
    "table_from_json",
]
