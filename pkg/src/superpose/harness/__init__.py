"""Experiment harness: configuration, Monte Carlo runs, bound reports, sweeps and persistence."""

from .config import ConfigError, ExperimentConfig, config_from_dict, load_config, parse_override
from .montecarlo import MonteCarloResult, TrialRecord, run_monte_carlo, wilson_interval
from .report import BoundReport, BoundRow, compare_bounds, compare_bounds_for
from .verify import CheckRecord, VerificationReport, verify_lemmas

__all__ = [
    "BoundReport",
    "BoundRow",
    "CheckRecord",
    "ConfigError",
    "ExperimentConfig",
    "MonteCarloResult",
    "TrialRecord",
    "VerificationReport",
    "compare_bounds",
    "compare_bounds_for",
    "config_from_dict",
    "load_config",
    "parse_override",
    "run_monte_carlo",
    "verify_lemmas",
    "wilson_interval",
]
