import xml.etree.ElementTree as ET
import re

import pytest
from openpyxl import load_workbook

from src.cli import main
from src.cli.csv_export import read_report_csv
from src.errors import MalformedCsvError

BATCH_CSV = (
    "t,segment,k,meta_err,src0_err,src1_err,best_err,worst_err,uniform_err\n"
    "0,0,0,0.1,0.1,0.5,0.1,0.5,0.3\n"
    "1,0,0,0.2,0.15,0.45,0.15,0.45,0.25\n"
    "2,1,1,0.05,0.4,0.05,0.05,0.4,0.2\n"
)
FORGETTING_CSV = (
    "checkpoint,source_id,adapted_err,pristine_err,param_drift\n"
    "segment_0,0,0.03,0.02,0.1\n"
    "segment_0,1,0.04,0.04,0.0\n"
    "segment_1,0,0.03,0.02,0.1\n"
    "segment_1,1,0.05,0.04,0.2\n"
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8", newline="\n")
    return str(path)


def path_vertices(svg_path, gid):
    root = ET.parse(svg_path).getroot()
    group = next(element for element in root.iter() if element.get("id") == gid)
    d = next(element for element in group.iter() if element.tag.endswith("path")).get("d")
    return len(re.findall(r"[ML]", d))


def test_report_writes_charts_and_workbook(tmp_path):
    batches = write(tmp_path, "batches.csv", BATCH_CSV)
    forgetting = write(tmp_path, "forgetting.csv", FORGETTING_CSV)
    out = tmp_path / "report"
    assert main(["report", batches, forgetting, "--out", str(out)]) == 0

    error_svg = out / "batches_error.svg"
    for series in ("meta_err", "best_err", "worst_err", "uniform_err"):
        assert path_vertices(error_svg, f"series-{series}") == 3
    assert "test batch t" in error_svg.read_text(encoding="utf-8")
    assert path_vertices(out / "forgetting.svg", "series-source_1") == 2
    assert path_vertices(out / "forgetting.svg", "series-source_1_pristine") == 2

    workbook = load_workbook(out / "summary.xlsx")
    assert workbook.sheetnames == ["Run Summary", "Batches", "Forgetting"]
    labels = [row[0].value for row in workbook["Run Summary"].iter_rows(min_row=2)]
    assert "Mean MeTA error" in labels
    assert "Batches selecting source 1" in labels


def test_reports_are_reproducible(tmp_path):
    batches = write(tmp_path, "batches.csv", BATCH_CSV)
    assert main(["report", batches, "--out", str(tmp_path / "a")]) == 0
    assert main(["report", batches, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "batches_error.svg").read_bytes() == (tmp_path / "b" / "batches_error.svg").read_bytes()


def test_empty_csv_is_a_usage_error(tmp_path):
    header_only = write(tmp_path, "empty.csv", BATCH_CSV.splitlines()[0] + "\n")
    assert main(["report", header_only, "--out", str(tmp_path / "r")]) == 2
    assert main(["report", write(tmp_path, "blank.csv", ""), "--out", str(tmp_path / "r")]) == 2


def test_malformed_cell_reports_its_row(tmp_path, capsys):
    broken = BATCH_CSV.replace("0.15,0.45,0.15", "0.15,oops,0.15")
    path = write(tmp_path, "broken.csv", broken)
    with pytest.raises(MalformedCsvError) as error:
        read_report_csv(path)
    assert error.value.row == 3
    assert main(["report", path, "--out", str(tmp_path / "r")]) == 2
    assert "row 3" in capsys.readouterr().err


def test_missing_columns_are_rejected(tmp_path):
    path = write(tmp_path, "partial.csv", "t,segment,meta_err\n0,0,0.1\n")
    with pytest.raises(MalformedCsvError) as error:
        read_report_csv(path)
    assert error.value.row == 1


def test_kind_is_read_from_the_header(tmp_path):
    kind, frame = read_report_csv(write(tmp_path, "f.csv", FORGETTING_CSV))
    assert kind == "forgetting"
    assert frame["checkpoint"].tolist()[0] == "segment_0"
    assert frame["adapted_err"].dtype.kind == "f"
