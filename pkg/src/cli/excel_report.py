from pathlib import Path
from typing import Optional, Union

import pandas as pd
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side

from .csv_export import source_columns

HEADER_FILL = PatternFill(start_color="2E86AB", end_color="2E86AB", fill_type="solid")
LABEL_FILL = PatternFill(start_color="F8F9FA", end_color="F8F9FA", fill_type="solid")
PLAIN_FILL = PatternFill(start_color="FFFFFF", end_color="FFFFFF", fill_type="solid")
THIN = Side(style="thin", color="D1D5DB")
BORDER = Border(left=THIN, right=THIN, top=THIN, bottom=THIN)


def write_summary_workbook(
    batches: pd.DataFrame,
    path: Union[str, Path],
    forgetting: Optional[pd.DataFrame] = None,
) -> Path:
    """summary.xlsx with a run summary, the per-batch table and, when given, the forgetting table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        summary_frame(batches).to_excel(writer, sheet_name="Run Summary", index=False)
        style_summary_sheet(writer.sheets["Run Summary"])
        batches.to_excel(writer, sheet_name="Batches", index=False)
        style_data_sheet(writer.sheets["Batches"])
        if forgetting is not None:
            forgetting.to_excel(writer, sheet_name="Forgetting", index=False)
            style_data_sheet(writer.sheets["Forgetting"])
    return path


def summary_frame(batches: pd.DataFrame) -> pd.DataFrame:
    metrics = [("Batches", len(batches))]
    for column, label in (
        ("meta_err", "Mean MeTA error"),
        ("best_err", "Mean best-source error"),
        ("worst_err", "Mean worst-source error"),
        ("uniform_err", "Mean uniform-ensemble error"),
        ("alpha_best", "Mean step size"),
        ("entropy_final", "Mean final weight entropy"),
    ):
        if column in batches.columns:
            metrics.append((label, f"{batches[column].mean():.4f}"))
    if "k" in batches.columns:
        counts = batches["k"].astype(int).value_counts().sort_index()
        n_sources = len(source_columns(batches)) or int(counts.index.max()) + 1
        for source in range(n_sources):
            metrics.append((f"Batches selecting source {source}", int(counts.get(source, 0))))
    return pd.DataFrame(metrics, columns=["Metric", "Value"])


def _header(worksheet, size: int):
    for cell in worksheet[1]:
        cell.fill = HEADER_FILL
        cell.font = Font(name="Segoe UI", size=size, bold=True, color="FFFFFF")
        cell.alignment = Alignment(horizontal="center", vertical="center")
        cell.border = BORDER
    worksheet.row_dimensions[1].height = 25


def _fit_columns(worksheet, padding: int, limit: int):
    for column in worksheet.columns:
        width = max(len(str(cell.value)) for cell in column if cell.value is not None)
        worksheet.column_dimensions[column[0].column_letter].width = min(width + padding, limit)


def style_summary_sheet(worksheet):
    _header(worksheet, 12)
    for row in worksheet.iter_rows(min_row=2):
        for index, cell in enumerate(row):
            cell.border = BORDER
            cell.fill = LABEL_FILL if index == 0 else PLAIN_FILL
            cell.font = Font(name="Segoe UI", size=10, bold=index == 0)
            cell.alignment = Alignment(horizontal="left", vertical="center")
    _fit_columns(worksheet, 3, 60)


def style_data_sheet(worksheet):
    _header(worksheet, 11)
    for row_index, row in enumerate(worksheet.iter_rows(min_row=2), start=2):
        fill = PLAIN_FILL if row_index % 2 == 0 else LABEL_FILL
        for cell in row:
            cell.border = BORDER
            cell.fill = fill
            cell.font = Font(name="Segoe UI", size=9)
    _fit_columns(worksheet, 2, 50)
