"""
CSV and JSON emission of trial records, and the matching readers.
"""

import json
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd

from core.errors import InvalidInputError
from core.models import RECORD_COLUMNS, OutputFormat, RecordFile, TrialRecord
from .fit import records_frame

FLOAT_FORMAT = "%.17g"


def emit(records: Sequence[TrialRecord], fmt: Union[OutputFormat, str], path: Union[str, Path]) -> Path:
    """Write records as UTF-8 CSV (header row, LF endings) or as a RecordFile JSON document.

    The `seed` column is the protocol seed of the (point, trial) pair. Samples are
    drawn from `data_seed(master_seed, trial)` instead, which every point of a
    sweep shares; rerunning a record needs both.
    """
    fmt = OutputFormat(fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == OutputFormat.CSV:
        df = records_frame(records)
        df["error"] = df["error"].astype(int)
        df.to_csv(path, index=False, columns=RECORD_COLUMNS, float_format=FLOAT_FORMAT,
                  lineterminator="\n", encoding="utf-8")
    else:
        document = RecordFile(records=list(records))
        path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_records(path: Union[str, Path], fmt: Union[OutputFormat, str, None] = None) -> List[TrialRecord]:
    path = Path(path)
    if fmt is None:
        fmt = OutputFormat.JSON if path.suffix.lower() == ".json" else OutputFormat.CSV
    fmt = OutputFormat(fmt)

    if fmt == OutputFormat.JSON:
        return RecordFile.model_validate(json.loads(path.read_text(encoding="utf-8"))).records

    df = pd.read_csv(path, dtype={"scheme": str}, encoding="utf-8", float_precision="round_trip")
    if list(df.columns) != RECORD_COLUMNS:
        raise InvalidInputError(f"{path}: columns {list(df.columns)} != {RECORD_COLUMNS}")
    df["error"] = df["error"].astype(bool)
    # object dtype hands pydantic plain Python scalars
    return [TrialRecord(**row) for row in df.astype(object).to_dict(orient="records")]
