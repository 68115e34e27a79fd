from ._core import (
    InvalidInput,
    InvalidSchedule,
    SolverError,
    adas_scenario,
    bytes_to_duration,
    census,
    e2e_bounds,
    fixture_schedule,
    gen_chain,
    lstb_solve,
    shaper_table_csv,
    simulate,
    smt_solve,
    validate,
)

__all__ = [
    "InvalidInput",
    "InvalidSchedule",
    "SolverError",
    "adas_scenario",
    "bytes_to_duration",
    "census",
    "e2e_bounds",
    "fixture_schedule",
    "gen_chain",
    "lstb_solve",
    "shaper_table_csv",
    "simulate",
    "smt_solve",
    "validate",
]
