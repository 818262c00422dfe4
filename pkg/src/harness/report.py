import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Literal, Sequence

from src.harness.experiment import OPPONENT_TYPES, ExperimentResult
from src.harness.stats import OpponentStats
from src.utils.data_processing import dump_record, read_records

ReportFormat = Literal["table", "csv", "jsonl"]
CSV_FIELDS = ["n_high", "n_games", "opponent", "n", "mean", "t", "p", "significant"]


@dataclass(frozen=True)
class ReportRow:
    n_high: int
    n_games: int
    opponents: Dict[str, OpponentStats]

    @classmethod
    def from_result(cls, result: ExperimentResult) -> "ReportRow":
        return cls(result.spec.n_high, len(result.games), dict(result.stats))

    @classmethod
    def from_record(cls, record: Dict[str, object]) -> "ReportRow":
        opponents = {k: OpponentStats.from_record(v) for k, v in record["opponents"].items()}
        return cls(int(record["n_high"]), int(record["n_games"]), opponents)


def load_rows(paths: Iterable[str]) -> List[ReportRow]:
    """Summary rows of one or more results.jsonl files."""
    return [ReportRow.from_record(r) for path in paths for r in read_records(path) if r.get("type") == "summary"]


def _number(value: float) -> str:
    return "" if math.isnan(value) else repr(float(value))


def _cell(stats: OpponentStats) -> str:
    if math.isnan(stats.mean):
        return "-"
    text = f"{stats.mean:.0f}"
    # Italic cells are not significant at the batch's alpha.
    return text if stats.significant else f"_{text}_"


def render_table(rows: Sequence[ReportRow]) -> str:
    header = "| # high-bidders (games) | " + " | ".join(OPPONENT_TYPES) + " |"
    lines = [header, "|" + "---|" * (len(OPPONENT_TYPES) + 1)]
    for row in rows:
        cells = [_cell(row.opponents[o]) if o in row.opponents else "-" for o in OPPONENT_TYPES]
        lines.append(f"| {row.n_high} ({row.n_games}) | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[ReportRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        for opponent, s in row.opponents.items():
            writer.writerow(
                [row.n_high, row.n_games, opponent, s.n, _number(s.mean), _number(s.t), _number(s.p), int(s.significant)]
            )
    return buffer.getvalue()


def render_jsonl(rows: Sequence[ReportRow]) -> str:
    return "".join(
        dump_record(
            {
                "n_high": row.n_high,
                "n_games": row.n_games,
                "opponents": {o: s.to_record() for o, s in row.opponents.items()},
            }
        )
        + "\n"
        for row in rows
    )


def report(rows: Iterable[ReportRow], fmt: ReportFormat = "table") -> str:
    """
    Renders experiment summaries as one row per n_high, most high-bidders first.

    Cells are ATTac's mean score minus the opponent type's, in dollars. An
    empty input yields the header alone (nothing at all for jsonl).
    """
    ordered = sorted(rows, key=lambda r: r.n_high, reverse=True)
    renderers = {"table": render_table, "csv": render_csv, "jsonl": render_jsonl}
    if fmt not in renderers:
        raise ValueError(f"Unsupported report format: {fmt}")
    return renderers[fmt](ordered)
