from .config import ExperimentConfig
from .ensembles import gen_gaussian_instance, gen_noise, gen_support_estimate
from .figures import emit_figures
from .runner import (TrialRecord, aggregate_records, run_certified_bound_check,
                     run_recovery_experiment, write_aggregate_json,
                     write_trial_csv)

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "gen_gaussian_instance",
    "gen_support_estimate",
    "gen_noise",
    "run_recovery_experiment",
    "run_certified_bound_check",
    "aggregate_records",
    "write_trial_csv",
    "write_aggregate_json",
    "emit_figures",
]
