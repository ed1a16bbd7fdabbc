from ._core import (
    EigenSystem,
    FracmixError,
    IllPosedModeError,
    constant_potential_system,
    delta_problem1,
    delta_problem2,
    illposed_p_catalog,
    mlf,
    mlf_array,
    mode_delta,
    reconstruct,
    run_config,
    solve_eigensystem,
)

__all__ = [
    "EigenSystem",
    "FracmixError",
    "IllPosedModeError",
    "constant_potential_system",
    "delta_problem1",
    "delta_problem2",
    "illposed_p_catalog",
    "mlf",
    "mlf_array",
    "mode_delta",
    "reconstruct",
    "run_config",
    "solve_eigensystem",
]
