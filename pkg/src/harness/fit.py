"""
Aggregation of trial records and log-log scaling fits.
"""

from typing import List, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from core.errors import InvalidInputError
from core.models import RECORD_COLUMNS, ScalingFit, TrialRecord

POINT_KEYS = ["scheme", "d1", "d2", "m", "n", "B1", "B2"]
AXIS_COLUMNS = {"m": "m", "B": "B1", "bits": "B2"}
RESPONSE_COLUMNS = {"op": "dist_op", "fr": "dist_fr"}


def records_frame(records: Sequence[TrialRecord]) -> pd.DataFrame:
    rows = [r.model_dump() for r in records]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def _stderr(x: pd.Series) -> float:
    return float(x.std(ddof=1) / np.sqrt(len(x))) if len(x) > 1 else 0.0


def summarize(records: Sequence[TrialRecord]) -> pd.DataFrame:
    """Per-point mean and standard error of both distortions, error rate and mean bits."""
    df = records_frame(records)
    if df.empty:
        return pd.DataFrame(columns=POINT_KEYS + [
            "trials", "dist_op_mean", "dist_op_stderr", "dist_fr_mean", "dist_fr_stderr",
            "error_rate", "bits1_mean", "bits2_mean",
        ])
    grouped = df.groupby(POINT_KEYS, sort=False)
    summary = grouped.agg(
        trials=("trial", "count"),
        dist_op_mean=("dist_op", "mean"),
        dist_op_stderr=("dist_op", _stderr),
        dist_fr_mean=("dist_fr", "mean"),
        dist_fr_stderr=("dist_fr", _stderr),
        error_rate=("error", "mean"),
        bits1_mean=("bits1", "mean"),
        bits2_mean=("bits2", "mean"),
    )
    return summary.reset_index()


def scaling_fit(records: Sequence[TrialRecord], axis: str = "m", response: str = "op",
                min_points: int = 4, min_trials: int = 50) -> ScalingFit:
    """
    Least-squares fit of log(mean distortion) on log(axis).

    axis: "m" (samples), "B" (per-agent budget) or "bits" (total budget).
    """
    if axis not in AXIS_COLUMNS:
        raise InvalidInputError(f"axis must be one of {sorted(AXIS_COLUMNS)}, got {axis!r}")
    if response not in RESPONSE_COLUMNS:
        raise InvalidInputError(f"response must be one of {sorted(RESPONSE_COLUMNS)}, got {response!r}")

    df = records_frame(records)
    column, target = AXIS_COLUMNS[axis], RESPONSE_COLUMNS[response]
    grouped = df.groupby(column)[target].agg(["mean", "count"]).sort_index()

    if len(grouped) < min_points:
        raise InvalidInputError(
            f"need at least {min_points} distinct {axis} values, got {len(grouped)}"
        )
    thin = grouped[grouped["count"] < min_trials]
    if not thin.empty:
        raise InvalidInputError(
            f"each {axis} value needs at least {min_trials} trials; "
            f"{list(thin.index)} have {list(thin['count'])}"
        )
    if (grouped["mean"] <= 0).any() or (grouped.index.to_numpy() <= 0).any():
        raise InvalidInputError("log-log fit needs positive axis values and distortions")

    x = np.log(grouped.index.to_numpy(dtype=float))
    y = np.log(grouped["mean"].to_numpy(dtype=float))
    fit = stats.linregress(x, y)
    return ScalingFit(slope=float(fit.slope), intercept=float(fit.intercept),
                      stderr=float(fit.stderr), points=len(grouped), axis=axis, response=response)


def loglog_slopes(summary: pd.DataFrame, axis_column: str, response: str = "dist_op_mean") -> List[float]:
    """Slopes between consecutive rows of a summary, in row order."""
    x = np.log(summary[axis_column].to_numpy(dtype=float))
    y = np.log(summary[response].to_numpy(dtype=float))
    return list(np.diff(y) / np.diff(x))
