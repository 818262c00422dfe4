import csv
import io
import math

import pytest

from src.harness import ReportRow, load_rows, report
from src.harness.stats import OpponentStats
from src.utils.data_processing import write_records

HEADER = "| # high-bidders (games) | high | low |\n|---|---|---|\n"


def row(n_high, high, low, n_games=20):
    return ReportRow(n_high, n_games, {"high": high, "low": low})


SIGNIFICANT = OpponentStats(20, 1236.4, 7.2, 0.0001, True)
WEAK = OpponentStats(20, 73.2, 1.1, 0.28, False)
MISSING = OpponentStats(0, math.nan, math.nan, math.nan, False)


def test_empty_batch_renders_the_header_alone():
    assert report([]) == HEADER
    assert report([], fmt="jsonl") == ""


def test_rows_run_from_most_high_bidders_down_and_weak_cells_are_italic():
    text = report([row(0, MISSING, WEAK), row(7, SIGNIFICANT, MISSING)])
    assert text == HEADER + "| 7 (20) | 1236 | - |\n" + "| 0 (20) | - | _73_ |\n"


def test_csv_carries_every_number():
    text = report([row(3, SIGNIFICANT, WEAK)], fmt="csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["opponent"] for r in rows] == ["high", "low"]
    assert float(rows[0]["mean"]) == SIGNIFICANT.mean
    assert rows[0]["significant"] == "1"
    assert rows[1]["significant"] == "0"
    assert float(rows[1]["p"]) == WEAK.p


def test_csv_leaves_missing_numbers_blank():
    rows = list(csv.DictReader(io.StringIO(report([row(7, SIGNIFICANT, MISSING)], fmt="csv"))))
    assert rows[1]["mean"] == "" and rows[1]["t"] == ""


def test_unknown_format():
    with pytest.raises(ValueError):
        report([], fmt="html")


def test_rows_load_from_results_files(tmp_path):
    path = tmp_path / "results.jsonl"
    write_records(
        str(path),
        [
            {"type": "game", "n_high": 4, "seed": 0},
            {
                "type": "summary",
                "n_high": 4,
                "n_games": 20,
                "opponents": {"high": SIGNIFICANT.to_record(), "low": MISSING.to_record()},
            },
        ],
    )
    [loaded] = load_rows([str(path)])
    assert loaded.n_high == 4
    assert loaded.opponents["high"] == SIGNIFICANT
    assert math.isnan(loaded.opponents["low"].mean)
    assert report([loaded]) == HEADER + "| 4 (20) | 1236 | - |\n"
