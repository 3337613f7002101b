# Copyright (c) 2026 the hdgmd authors
# SPDX-License-Identifier: Apache-2.0
"""HDG solver for miscible displacement in porous media."""

from ._hdgmd import (
    ErrorReport,
    HdgmdError,
    Mesh,
    RunResult,
    Scenario,
    convergence_study,
    dispersion,
    lshape,
    lshape_scenario,
    load_mesh,
    mms_square_scenario,
    refine,
    save_mesh,
    scenario_from_config,
    simulate,
    unit_square,
    viscosity,
    zero_scenario,
)

__all__ = [
    "ErrorReport",
    "HdgmdError",
    "Mesh",
    "RunResult",
    "Scenario",
    "convergence_study",
    "dispersion",
    "lshape",
    "lshape_scenario",
    "load_mesh",
    "mms_square_scenario",
    "refine",
    "save_mesh",
    "scenario_from_config",
    "simulate",
    "unit_square",
    "viscosity",
    "zero_scenario",
]

__version__ = "0.1.0"
