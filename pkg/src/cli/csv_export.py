"""CSV files written by the commands and read back by the report.

Floats are written with pandas' default shortest round-trip repr, UTF-8, LF.
"""
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import pandas as pd

from config import CSV_LINE_TERMINATOR
from ..errors import MalformedCsvError
from ..models import BatchRecord, ForgettingRecord, SourceBaselineRecord, TrainingSummaryRow, UniformRecord

BATCH_KIND = "batches"
FORGETTING_KIND = "forgetting"
BATCH_REQUIRED = ["t", "segment", "meta_err", "best_err", "worst_err", "uniform_err"]
FORGETTING_REQUIRED = ["checkpoint", "source_id", "adapted_err", "pristine_err", "param_drift"]


def batch_frame(records: Sequence[BatchRecord]) -> pd.DataFrame:
    rows = []
    for record in records:
        row = {"t": record.t, "segment": record.segment}
        row.update({f"pi_{j}": value for j, value in enumerate(record.pi)})
        row.update({f"winit_{j}": value for j, value in enumerate(record.w_init)})
        row.update({f"wstar_{j}": value for j, value in enumerate(record.w_star)})
        row.update({
            "k": record.k,
            "alpha_best": record.alpha_best,
            "entropy_init": record.entropy_init,
            "entropy_final": record.entropy_final,
            "meta_err": record.meta_error,
        })
        row.update({f"src{j}_err": value for j, value in enumerate(record.source_errors)})
        row.update({
            "best_err": record.best_error,
            "worst_err": record.worst_error,
            "uniform_err": record.uniform_error,
        })
        rows.append(row)
    return pd.DataFrame(rows)


def forgetting_frame(records: Sequence[ForgettingRecord]) -> pd.DataFrame:
    rows = [
        {
            "checkpoint": record.checkpoint,
            "source_id": j,
            "adapted_err": record.adapted_errors[j],
            "pristine_err": record.pristine_errors[j],
            "param_drift": record.param_drift[j],
        }
        for record in records
        for j in range(len(record.adapted_errors))
    ]
    return pd.DataFrame(rows, columns=FORGETTING_REQUIRED)


def single_source_frame(records: Sequence[SourceBaselineRecord]) -> pd.DataFrame:
    rows = []
    for record in records:
        row = {"t": record.t, "segment": record.segment}
        row.update({f"src{j}_err": value for j, value in enumerate(record.source_errors)})
        row.update({"best_err": record.best_error, "worst_err": record.worst_error})
        rows.append(row)
    return pd.DataFrame(rows)


def uniform_frame(records: Sequence[UniformRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.model_dump() for record in records], columns=["t", "segment", "uniform_error"]).rename(
        columns={"uniform_error": "uniform_err"}
    )


def training_frame(rows: Sequence[TrainingSummaryRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows])


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator=CSV_LINE_TERMINATOR)
    return path


def read_report_csv(path: Union[str, Path]) -> Tuple[str, pd.DataFrame]:
    """Load a batch or forgetting CSV; the kind is told apart by its header."""
    path = Path(path)
    if not path.is_file():
        raise MalformedCsvError(f"{path}: file not found")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise MalformedCsvError(f"{path}: empty file", row=1)
    except pd.errors.ParserError as e:
        raise MalformedCsvError(f"{path}: {e}")

    kind = FORGETTING_KIND if "checkpoint" in frame.columns else BATCH_KIND
    required = FORGETTING_REQUIRED if kind == FORGETTING_KIND else BATCH_REQUIRED
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise MalformedCsvError(f"{path}: missing columns {missing}", row=1)
    if frame.empty:
        raise MalformedCsvError(f"{path}: no data rows", row=2)

    for column in frame.columns:
        if column == "checkpoint":
            continue
        numeric = pd.to_numeric(frame[column], errors="coerce")
        bad = numeric.isna()
        if bad.any():
            # header is line 1
            line = int(bad.to_numpy().argmax()) + 2
            raise MalformedCsvError(f"{path}: column {column!r} is not numeric", row=line)
        frame[column] = numeric
    return kind, frame


def source_columns(frame: pd.DataFrame, prefix: str = "src", suffix: str = "_err") -> List[str]:
    return sorted(
        (c for c in frame.columns if c.startswith(prefix) and c.endswith(suffix) and c[len(prefix):-len(suffix)].isdigit()),
        key=lambda c: int(c[len(prefix):-len(suffix)]),
    )
