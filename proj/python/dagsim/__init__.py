"""Credit-based write access to a DAG ledger, simulated.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports the pieces useful from python.
"""

from ._core import (
    SchedulerBuffer,
    latency_cdf,
    moving_average,
    optimal_allot_count,
    preset_config,
    preset_names,
    priority_score,
    run_scenario,
    sample_token_distribution,
    validate_config,
    windowed_rate,
)

__all__ = [
    "SchedulerBuffer",
    "latency_cdf",
    "moving_average",
    "optimal_allot_count",
    "preset_config",
    "preset_names",
    "priority_score",
    "run_scenario",
    "sample_token_distribution",
    "validate_config",
    "windowed_rate",
]
