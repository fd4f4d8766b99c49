"""Experiment harness: seeded sweeps, record emission, scaling fits and the theory registry."""

from .emit import emit, read_records
from .fit import loglog_slopes, records_frame, scaling_fit, summarize
from .registry import THEORY_OPERATIONS, evaluate, to_jsonable
from .sweep import ExperimentRunner, SweepPoint, build_model, data_seed, run_sweep, sweep_points, trial_seed

__all__ = [
    "ExperimentRunner",
    "SweepPoint",
    "THEORY_OPERATIONS",
    "build_model",
    "data_seed",
    "emit",
    "evaluate",
    "loglog_slopes",
    "read_records",
    "records_frame",
    "run_sweep",
    "scaling_fit",
    "summarize",
    "sweep_points",
    "to_jsonable",
    "trial_seed",
]
